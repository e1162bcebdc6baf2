#include "core/field.hpp"

namespace facetflow {

DiscreteField::DiscreteField(std::shared_ptr<const Mesh> mesh, int components)
    : mesh_(std::move(mesh)), components_(components) {
    if (components_ < 1) throw std::invalid_argument("DiscreteField: components must be >= 1");
    u_ = Eigen::MatrixXd::Zero(mesh_->num_vertices(), components_);
    update_gradients();
}

DiscreteField DiscreteField::from_function(std::shared_ptr<const Mesh> mesh, int components,
                                           const std::function<Eigen::VectorXd(const Vec2&)>& fn) {
    DiscreteField f(std::move(mesh), components);
    for (int v = 0; v < f.mesh().num_vertices(); ++v)
        f.u_.row(v) = fn(f.mesh().vertices[v]).transpose();
    f.update_gradients();
    return f;
}

GradMat DiscreteField::gradient(int tri) const {
    return unflatten(du_.row(tri).transpose(), components_, 2);
}

void DiscreteField::update_gradients() {
    const Mesh& m = *mesh_;
    du_.resize(m.num_triangles(), 2 * components_);
    for (int t = 0; t < m.num_triangles(); ++t) {
        GradMat g = GradMat::Zero(components_, 2);
        for (int k = 0; k < 3; ++k)
            g.noalias() += u_.row(m.triangles[t][k]).transpose() * m.basis_grad[t][k].transpose();
        du_.row(t) = flatten(g).transpose();
    }
}

void DiscreteField::apply_dirichlet(const std::function<Eigen::VectorXd(const Vec2&)>& fn) {
    for (int v = 0; v < mesh_->num_vertices(); ++v)
        if (mesh_->boundary[v]) u_.row(v) = fn(mesh_->vertices[v]).transpose();
    update_gradients();
}

}  // namespace facetflow
