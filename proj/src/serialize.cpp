#include "wlab/serialize.hpp"

#include <sstream>

namespace wlab {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

json vec_to_json(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

}  // namespace

json to_json(const EnergyReport& r) {
  return json{{"surface", r.surface},
              {"grid", {r.resolution[0], r.resolution[1]}},
              {"area", r.area},
              {"willmore", r.willmore},
              {"total_sff", r.total_sff},
              {"total_gauss", r.total_gauss},
              {"total_traceless", r.total_traceless},
              {"error_estimates",
               {{"area", r.err_area},
                {"willmore", r.err_willmore},
                {"total_sff", r.err_sff},
                {"total_gauss", r.err_gauss},
                {"total_traceless", r.err_traceless}}},
              {"truncation_tail",
               {{"area", r.tail_area},
                {"willmore", r.tail_willmore},
                {"total_sff", r.tail_sff},
                {"total_gauss", r.tail_gauss},
                {"total_traceless", r.tail_traceless}}},
              {"identity_willmore_residual", r.identity_willmore_residual},
              {"identity_traceless_residual", r.identity_traceless_residual},
              {"identities_ok", r.identities_ok}};
}

json to_json(const GaussBonnetRecord& r) {
  return json{{"chi_compact", r.chi_compact},
              {"n_ends", r.n_ends},
              {"chi_open", r.chi_open},
              {"end_multiplicity_sum", r.end_multiplicity_sum},
              {"branch_order_sum", r.branch_order_sum},
              {"predicted_total_gauss", r.predicted},
              {"measured_total_gauss", r.measured},
              {"combined_tolerance", r.combined_tolerance},
              {"consistent", r.consistent},
              {"white_unit", r.white_unit},
              {"white_multiple", r.white_multiple},
              {"white_ok", r.white_ok}};
}

json to_json(const InversionLedger& r) {
  return json{{"bracket_ends", r.bracket_ends},
              {"bracket_poles", r.bracket_poles},
              {"bracket", r.bracket},
              {"base", to_json(r.base)},
              {"pushforward", to_json(r.pushed)},
              {"predicted", {{"total_gauss", r.pred_gauss},
                             {"willmore", r.pred_willmore},
                             {"total_sff", r.pred_sff}}},
              {"measured", {{"total_gauss", r.pushed.total_gauss},
                            {"willmore", r.pushed.willmore},
                            {"total_sff", r.pushed.total_sff}}},
              {"tolerance", {{"total_gauss", r.tol_gauss},
                             {"willmore", r.tol_willmore},
                             {"total_sff", r.tol_sff}}},
              {"ok", {{"total_gauss", r.ok_gauss},
                      {"willmore", r.ok_willmore},
                      {"total_sff", r.ok_sff}}},
              {"all_ok", r.all_ok}};
}

json to_json(const MoebiusTransform& t) {
  json rot = json::array();
  for (int i = 0; i < t.dim; ++i)
    for (int j = 0; j < t.dim; ++j) rot.push_back(t.rotation(i, j));
  return json{{"rotation", rot},
              {"scale", t.scale},
              {"translation", vec_to_json(t.translation)},
              {"inversion_center",
               t.inversion_center ? json(vec_to_json(*t.inversion_center)) : json(nullptr)}};
}

MoebiusTransform moebius_from_json(const json& j) {
  const auto tr = j.at("translation");
  const int n = int(tr.size());
  MoebiusTransform t = MoebiusTransform::identity(n);
  const auto rot = j.at("rotation");
  if (int(rot.size()) != n * n) throw config_error("rotation entry count mismatch");
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) t.rotation(i, k) = rot.at(i * n + k).get<double>();
  t.scale = j.at("scale").get<double>();
  for (int i = 0; i < n; ++i) t.translation[i] = tr.at(i).get<double>();
  if (!j.at("inversion_center").is_null()) {
    Vec c(n);
    for (int i = 0; i < n; ++i) c[i] = j.at("inversion_center").at(i).get<double>();
    t.inversion_center = c;
  }
  return t;
}

json to_json(const WeightedDistance& d) {
  return json{{"value", d.value},
              {"components", {d.comp[0], d.comp[1], d.comp[2]}},
              {"weight_source", d.weight_source},
              {"grid", d.grid_tag}};
}

json to_json(const AlignmentResult& r) {
  return json{{"model", r.model},
              {"base_level", r.base_level},
              {"transform", to_json(r.transform)},
              {"reparam",
               r.reparam.kind == Reparameterization::Kind::cylinder_shift
                   ? json{{"kind", "cylinder-shift"}, {"v0", r.reparam.v0},
                          {"theta0", r.reparam.theta0}}
                   : json{{"kind", "sphere-moebius"},
                          {"a", {r.reparam.a.real(), r.reparam.a.imag()}},
                          {"b", {r.reparam.b.real(), r.reparam.b.imag()}},
                          {"c", {r.reparam.c.real(), r.reparam.c.imag()}},
                          {"d", {r.reparam.d.real(), r.reparam.d.imag()}}}},
              {"distance", to_json(r.distance)},
              {"delta", r.delta},
              {"area", r.area},
              {"model_param", r.model_param},
              {"iterations", r.iterations},
              {"converged", r.converged}};
}

json to_json(const SweepResult& r) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back(json{{"epsilon", row.epsilon},
                        {"delta", row.delta},
                        {"distance", row.distance},
                        {"area", row.area},
                        {"normalized_distance", row.normalized_distance},
                        {"converged", row.converged}});
  return json{{"family", r.family},
              {"rows", rows},
              {"fit", {{"exponent", r.exponent},
                       {"residual", r.fit_residual},
                       {"rows_used", r.rows_used}}},
              {"spearman", r.spearman}};
}

std::string sweep_csv(const SweepResult& r) {
  std::ostringstream os;
  os << "epsilon,delta,distance,area,normalized_distance,converged\n";
  for (const auto& row : r.rows)
    os << fmt(row.epsilon) << "," << fmt(row.delta) << "," << fmt(row.distance) << ","
       << fmt(row.area) << "," << fmt(row.normalized_distance) << ","
       << (row.converged ? 1 : 0) << "\n";
  return os.str();
}

std::string energy_csv_header() {
  return "surface,grid,area,willmore,total_sff,total_gauss,total_traceless,err_area,"
         "err_willmore,err_sff,err_gauss,err_traceless\n";
}

std::string energy_csv_row(const EnergyReport& r) {
  std::ostringstream os;
  os << r.surface << "," << r.resolution[0] << "x" << r.resolution[1] << "," << fmt(r.area) << ","
     << fmt(r.willmore) << "," << fmt(r.total_sff) << "," << fmt(r.total_gauss) << ","
     << fmt(r.total_traceless) << "," << fmt(r.err_area) << "," << fmt(r.err_willmore) << ","
     << fmt(r.err_sff) << "," << fmt(r.err_gauss) << "," << fmt(r.err_traceless) << "\n";
  return os.str();
}

std::string distance_csv_header() { return "surface,model,value,comp0,comp1,comp2,grid\n"; }

std::string distance_csv_row(const std::string& surface, const std::string& model,
                             const WeightedDistance& d) {
  std::ostringstream os;
  os << surface << "," << model << "," << fmt(d.value) << "," << fmt(d.comp[0]) << ","
     << fmt(d.comp[1]) << "," << fmt(d.comp[2]) << "," << d.grid_tag << "\n";
  return os.str();
}

std::string sweep_dat(const SweepResult& r) {
  std::ostringstream os;
  os << "# delta distance\n";
  for (const auto& row : r.rows) os << fmt(row.delta) << " " << fmt(row.distance) << "\n";
  return os.str();
}

std::string sweep_gnuplot(const std::string& dat_filename) {
  std::ostringstream os;
  os << "set logscale xy\n"
     << "set xlabel 'delta'\n"
     << "set ylabel 'aligned weighted distance'\n"
     << "plot '" << dat_filename << "' using 1:2 with linespoints title 'sweep'\n";
  return os.str();
}

}  // namespace wlab
