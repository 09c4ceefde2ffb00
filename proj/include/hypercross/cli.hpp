#pragma once

// Command-line front end. Exit codes: 0 success, 2 when a computed verdict or
// bound fails, 1 for usage and numerical errors.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hypercross/cross.hpp"
#include "hypercross/error.hpp"
#include "hypercross/io.hpp"
#include "hypercross/parallel.hpp"
#include "hypercross/pde/reference.hpp"
#include "hypercross/pde/studies.hpp"
#include "hypercross/summability.hpp"
#include "hypercross/tensorfield.hpp"

namespace hypercross::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitBound = 2;

namespace detail {

using io::Json;

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::InvalidArgument, "cannot write " + path);
  out << text;
  if (!out) fail(ErrorKind::InvalidArgument, "write failed: " + path);
}

/// JSON to --out when given, else to stdout.
inline void emit(const Json& j, const std::string& out_path, std::ostream& out) {
  const std::string text = j.dump(2) + "\n";
  if (out_path.empty())
    out << text;
  else
    write_text(out_path, text);
}

inline std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      fail(ErrorKind::InvalidArgument, "bad number in list: \"" + item + "\"");
    }
  }
  if (out.empty()) fail(ErrorKind::InvalidArgument, "empty list");
  return out;
}

inline Json report_json(const CardinalityReport& rep) {
  Json j;
  j["exact"] = rep.exact ? Json(*rep.exact) : Json(nullptr);
  j["lower_bound"] = rep.lower_bound;
  j["constant"] = io::to_json(rep.constant);
  j["upper_bound"] = io::to_json(rep.upper_bound);
  j["lower_ok"] = rep.lower_ok;
  j["upper_ok"] = rep.upper_ok;
  j["satisfied"] = rep.satisfied();
  j["skeleton_size"] = rep.skeleton_size;
  j["truncated"] = rep.truncated;
  return j;
}

inline Json study_json(const pde::StudyResult& res, double slope_min, double slope_max) {
  Json rows = Json::array();
  for (const auto& r : res.rows)
    rows.push_back(Json{{"T", r.T}, {"n", r.n}, {"error_V", r.error}, {"bound", r.bound}});
  Json j;
  j["rows"] = rows;
  j["constant"] = res.constant;
  j["slope"] = res.slope ? Json(*res.slope) : Json(nullptr);
  j["slope_range"] = Json::array({slope_min, slope_max});
  j["slope_ok"] = res.slope_in(slope_min, slope_max);
  j["bounds_ok"] = res.bounds_ok;
  j["reference_norm_V"] = res.reference_norm;
  return j;
}

}  // namespace detail

/// Runs one subcommand; output goes to `out`, diagnostics to `err`.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  using detail::Json;
  CLI::App app{"Hyperbolic-cross index sets and sparse stochastic Galerkin studies", "hypercross"};
  app.require_subcommand(1);
  app.fallthrough();
  unsigned threads = 0;
  std::string out_path;
  app.add_option("--threads", threads, "worker threads (default: $HYPERCROSS_THREADS, else 1)");
  app.add_option("--out", out_path, "write the main output to this file");

  // shared parameters
  double p = 1.0, a = 1.0, T = 1.0, alpha = 2.0, beta = 1.0, eps = 0.125, tol = 1e-6;
  std::uint32_t m = 1;
  std::string seq_path, spec_path, field_path, Ts_text;
  std::optional<std::uint64_t> max_level, max_dim;
  std::uint64_t cap = 10'000'000;
  double slope_min = -1.3, slope_max = -0.7;
  std::int64_t spatial_modes = 0;
  std::uint64_t max_degree = 3;
  std::string version = "V";
  std::uint32_t points = 4;

  auto add_cross = [&](CLI::App* sub) {
    sub->add_option("--a", a, "frequency exponent a > 0")->required();
    sub->add_option("--m", m, "spatial dimension")->required();
    sub->add_option("--T", T, "threshold T >= 1")->required();
    sub->add_option("--seq", seq_path, "weight sequence JSON")->required()->check(CLI::ExistingFile);
    sub->add_option("--max-level", max_level, "cap on |s|_1 (needed when ||b||_1 is near 1)");
    sub->add_option("--max-dim", max_dim, "cap on the support of s");
  };

  auto* summ = app.add_subcommand("summability", "classify w(s)^p summability and enclose the sum");
  summ->add_option("--p", p, "exponent p > 0")->required();
  summ->add_option("--seq", seq_path, "weight sequence JSON")->required()->check(CLI::ExistingFile);
  summ->add_option("--tol", tol, "relative width of the sum enclosure");

  auto* card = app.add_subcommand("card", "exact |E_{a,b}(T)| against the closed-form bounds");
  add_cross(card);
  card->add_option("--tol", tol, "relative width used for the constant C");

  auto* epsd = app.add_subcommand("epsdim", "eps-dimension of A^{alpha,b} in K^beta");
  epsd->add_option("--alpha", alpha)->required();
  epsd->add_option("--beta", beta)->required();
  epsd->add_option("--m", m)->required();
  epsd->add_option("--eps", eps)->required();
  epsd->add_option("--seq", seq_path)->required()->check(CLI::ExistingFile);
  epsd->add_option("--tol", tol);

  auto* mat = app.add_subcommand("materialize", "list E_{a,b}(T) as JSON lines");
  add_cross(mat);
  mat->add_option("--cap", cap, "refuse sets larger than this");

  auto* proj = app.add_subcommand("project-check", "check ||v - S_T v||_{K^beta} <= ||v||_{A^{alpha,b}} / T");
  proj->add_option("--field", field_path, "coefficient field, JSON lines")->required()->check(CLI::ExistingFile);
  proj->add_option("--m", m)->required();
  proj->add_option("--alpha", alpha)->required();
  proj->add_option("--beta", beta)->required();
  proj->add_option("--T", T)->required();
  proj->add_option("--seq", seq_path)->required()->check(CLI::ExistingFile);

  auto add_study = [&](CLI::App* sub) {
    sub->add_option("--spec", spec_path, "problem JSON")->required()->check(CLI::ExistingFile);
    sub->add_option("--Ts", Ts_text, "comma-separated thresholds")->required();
    sub->add_option("--slope-min", slope_min);
    sub->add_option("--slope-max", slope_max);
    sub->add_option("--spatial-modes", spatial_modes, "reference |k|_inf cutoff (0 = automatic)");
  };
  auto* spat = app.add_subcommand("spatial-study", "Fourier-Galerkin rate on G(T), CSV");
  add_study(spat);
  auto* pdes = app.add_subcommand("pde-study", "parametric Galerkin rate on E_{1,b}(T), CSV");
  add_study(pdes);
  pdes->add_option("--cap", cap, "largest index set to assemble");

  auto* decay = app.add_subcommand("decay-check", "Legendre coefficient norms against K (|s|!/s!) d^s");
  decay->add_option("--spec", spec_path, "problem JSON")->required()->check(CLI::ExistingFile);
  decay->add_option("--max-degree", max_degree, "check all s with |s|_1 up to this");
  decay->add_option("--version", version, "V or W decay constants")->check(CLI::IsMember({"V", "W"}));
  decay->add_option("--points", points, "minimum Gauss points per parameter");
  decay->add_option("--spatial-modes", spatial_modes);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    set_thread_count(threads);
    SkeletonOptions sk;
    sk.max_level = max_level;
    sk.max_dim = max_dim;

    if (*summ) {
      const WeightSequence b = io::sequence_from_json(io::load_file(seq_path));
      const SummabilityVerdict v = classify(p, b);
      Json j{{"verdict", to_string(v.verdict)}, {"rule", v.rule}, {"p", v.p},
             {"ell1", io::to_json(v.ell1)}, {"ellp", io::to_json(v.ellp)}};
      if (v.verdict == Verdict::Summable) {
        try {
          j["sum"] = io::to_json(sum_powers(p, b, tol));
        } catch (const Error& e) {
          j["sum"] = nullptr;
          j["sum_note"] = std::string(to_string(e.kind())) + ": " + e.what();
        }
      }
      if (v.verdict == Verdict::NotSummable && !v.ell1.divergent && v.ell1.lo > 1.0) {
        Json wit = Json::array();
        for (std::uint64_t scale : {10u, 20u, 40u, 80u}) {
          const MultiIndex s = divergence_witness(b, scale);
          wit.push_back(Json{{"scale", scale}, {"s", io::to_json(s)}, {"log_weight", log_weight(s, b).log_value}});
        }
        j["witness"] = wit;
      }
      detail::emit(j, out_path, out);
      return v.verdict == Verdict::Summable ? kExitOk : kExitBound;
    }

    if (*card) {
      const CrossParams params{a, m, io::sequence_from_json(io::load_file(seq_path)), T};
      const CardinalityReport rep = verify_bounds(params, tol, sk);
      detail::emit(detail::report_json(rep), out_path, out);
      return rep.satisfied() ? kExitOk : kExitBound;
    }

    if (*epsd) {
      const EpsDimension e = eps_dimension(alpha, beta, m, io::sequence_from_json(io::load_file(seq_path)), eps, tol);
      Json j{{"lower", e.lower},
             {"upper", e.upper},
             {"closed_lower", e.closed_lower},
             {"closed_upper", io::to_json(e.closed_upper)},
             {"constant", io::to_json(e.constant)},
             {"sandwich_ok", e.sandwich_ok}};
      detail::emit(j, out_path, out);
      return e.sandwich_ok ? kExitOk : kExitBound;
    }

    if (*mat) {
      const CrossParams params{a, m, io::sequence_from_json(io::load_file(seq_path)), T};
      const HyperbolicCross E = materialize(params, cap, sk);
      std::ostringstream lines;
      io::write_cross_jsonl(lines, E);
      if (out_path.empty()) {
        out << lines.str();
      } else {
        detail::write_text(out_path, lines.str());
        out << Json{{"count", E.entries.size()}, {"truncated", E.truncated}, {"out", out_path}}.dump() << "\n";
      }
      return kExitOk;
    }

    if (*proj) {
      std::ifstream in(field_path);
      const CoefficientField v = io::read_field_jsonl(in, m);
      const ProjectionReport rep =
          check_projection_lemma(v, T, alpha, beta, io::sequence_from_json(io::load_file(seq_path)));
      detail::emit(Json{{"lhs", rep.lhs}, {"rhs", rep.rhs}, {"ok", rep.ok}}, out_path, out);
      return rep.ok ? kExitOk : kExitBound;
    }

    if (*spat || *pdes) {
      const pde::ProblemSpec spec = io::problem_from_json(io::load_file(spec_path));
      const std::vector<double> Ts = detail::parse_list(Ts_text);
      pde::StudyOptions opts;
      opts.reference.spatial_modes = spatial_modes;
      opts.materialize_cap = cap;
      Json summary;
      pde::StudyResult res;
      if (*spat) {
        res = pde::spatial_study(spec, Ts, opts);
        summary = detail::study_json(res, slope_min, slope_max);
      } else {
        pde::ParametricConstants pc;
        res = pde::convergence_study(spec, Ts, opts, &pc);
        summary = detail::study_json(res, slope_min, slope_max);
        summary["b"] = io::to_json(pc.b);
        summary["K"] = pc.decay.K;
        summary["d"] = pc.decay.d;
        summary["C"] = io::to_json(pc.constC);
        summary["c_inverse_norm"] = pc.c_norm;
        summary["r"] = pc.ell.r;
        summary["R"] = pc.ell.R;
        summary["reference_points"] = res.reference_points;
      }
      const std::string csv = pde::to_csv(res);
      if (out_path.empty()) {
        out << csv;
        err << summary.dump() << "\n";
      } else {
        detail::write_text(out_path, csv);
        out << summary.dump(2) << "\n";
      }
      return res.bounds_ok && res.slope_in(slope_min, slope_max) ? kExitOk : kExitBound;
    }

    if (*decay) {
      const pde::ProblemSpec spec = io::problem_from_json(io::load_file(spec_path));
      const pde::Ellipticity ell = pde::ellipticity(spec);
      const pde::DecaySequences seq = version == "V" ? pde::decay_V(spec, ell) : pde::decay_W(spec, ell);
      pde::ReferenceOptions ro;
      ro.spatial_modes = spatial_modes;
      ro.min_points = std::max<std::uint32_t>(points, static_cast<std::uint32_t>(max_degree + 2));
      ro.max_points = std::max<std::uint32_t>(ro.max_points, ro.min_points);
      const pde::ReferenceSolution ref = pde::reference_solution(spec, ro);
      const auto s_list = pde::multi_indices_up_to(spec.J(), max_degree);
      bool ok = true;
      Json rows = Json::array();
      for (const auto& row : pde::coefficient_decay_check(ref, seq, s_list)) {
        ok = ok && row.ratio <= 1.0;
        rows.push_back(Json{{"s", io::to_json(row.s)}, {"norm_V", row.norm}, {"bound", row.bound}, {"ratio", row.ratio}});
      }
      Json j{{"version", version}, {"K", seq.K}, {"d", seq.d}, {"r", ell.r}, {"R", ell.R},
             {"points_per_dim", ref.points_per_dim}, {"rows", rows}, {"ok", ok}};
      detail::emit(j, out_path, out);
      return ok ? kExitOk : kExitBound;
    }
  } catch (const Error& e) {
    err << "error: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace hypercross::cli
