#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "higgslab/connection.hpp"
#include "higgslab/mesh.hpp"
#include "higgslab/quasiconformal.hpp"
#include "higgslab/reality.hpp"
#include "higgslab/vortex.hpp"

namespace higgslab {

using Json = nlohmann::ordered_json;

Json complex_json(Complex z);          // [re, im]
Json matrix_json(const Mat2& m);       // [[[re, im], [re, im]], [[re, im], [re, im]]]
Json solve_report_json(const SolveReport& r);
Json holonomy_json(const HolonomyReport& h);
Json reality_json(const RealityResidual& r, const HolonomyRealityReport& h, double min_angle);

// vertex_id, x, y, phi, psi, residual
void write_field_csv(std::ostream& out, const Mesh& mesh, const MetricField& field, const RealField& residual);
// vertex_id, re_mu, im_mu, abs_mu
void write_beltrami_csv(std::ostream& out, const BeltramiField& mu);
// triangle_id, norm
void write_face_csv(std::ostream& out, const RealField& face_values, const std::string& column);
// R, distance, lower_left_dzbar
void write_convergence_csv(std::ostream& out, const std::vector<LimitRow>& rows);

// Fixed-precision number formatting shared by all CSV writers.
std::string format_number(double x);

}  // namespace higgslab
