#pragma once

#include "core/mesh.hpp"
#include "core/types.hpp"

#include <functional>
#include <memory>

namespace facetflow {

// Piecewise-linear vector field on a mesh: nodal values u (one row per
// vertex, N columns) and the exact element gradients Du (one row per
// triangle holding the N x 2 matrix flattened column-major). Gradients are
// derived from u through the single assembly path update_gradients().
class DiscreteField {
public:
    DiscreteField(std::shared_ptr<const Mesh> mesh, int components);

    static DiscreteField from_function(std::shared_ptr<const Mesh> mesh, int components,
                                       const std::function<Eigen::VectorXd(const Vec2&)>& fn);

    const Mesh& mesh() const { return *mesh_; }
    std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
    int components() const { return components_; }

    Eigen::MatrixXd& values() { return u_; }
    const Eigen::MatrixXd& values() const { return u_; }

    // N x 2 gradient on one triangle.
    GradMat gradient(int tri) const;
    const Eigen::MatrixXd& gradients() const { return du_; }

    void update_gradients();

    // Overwrites boundary rows with the values of fn on boundary vertices.
    void apply_dirichlet(const std::function<Eigen::VectorXd(const Vec2&)>& fn);

private:
    std::shared_ptr<const Mesh> mesh_;
    int components_;
    Eigen::MatrixXd u_;   // V x N
    Eigen::MatrixXd du_;  // T x (2N), element gradient flattened column-major
};

}  // namespace facetflow
