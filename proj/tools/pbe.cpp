// pbe — certified "proof by example" for polynomial identities on varieties.
//
// Subcommands: bounds, certify, dichotomy, dimension, kronecker, geom, verify,
// nss-bounds.  Exit 0 = definitive verdict (PROVED / COMPONENT_PROVED / CASE1 /
// CASE2 / DIM_CONFIRMED / DISPROVED / VALID), exit 2 = INCONCLUSIVE / INVALID,
// exit 1 = usage or runtime error.  All outputs are deterministic.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "pbe/geometry.hpp"
#include "pbe/pipeline.hpp"

using namespace pbe;

namespace {

// ---------------------------------------------------------------------------
// Small I/O helpers
// ---------------------------------------------------------------------------

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << content;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("cannot rename " + tmp + " -> " + path);
}

PolySystem load_system(const std::string& path) {
  return PolySystem::from_json(nlohmann::json::parse(read_file(path)));
}

// ---------------------------------------------------------------------------
// Printing (nats + log10, both as short decimals)
// ---------------------------------------------------------------------------

std::string fmt_logbound(const LogBound& b) {
  if (b.is_neg_inf()) return "-inf nats";
  char buf[128];
  double nat = b.hi().get_d();
  double dec = log10_of(b).hi().get_d();
  std::snprintf(buf, sizeof buf, "%.4f nats (log10 %.4f)", nat, dec);
  return buf;
}

void print_report(const ThresholdReport& rep) {
  for (size_t i = 0; i < rep.chain.size(); ++i)
    std::cout << "  genericity threshold p" << i + 1 << " >= "
              << fmt_logbound(rep.chain[i]) << "\n";
  std::cout << "  log eps = " << fmt_logbound(rep.log_eps) << "\n";
  for (const auto& kv : rep.aux)
    std::cout << "  " << kv.first << " = " << fmt_logbound(kv.second) << "\n";
}

// ---------------------------------------------------------------------------
// Shared options
// ---------------------------------------------------------------------------

struct CommonOpts {
  std::string place_str = "inf";
  std::string radius = "1";
  std::string witness_file;
  bool auto_witness = false;
  bool main_chain = false;
  bool weak_chain = false;
  unsigned escalations = 2;
  std::string out;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_chain = true) {
  cmd->add_option("--place", o.place_str, "place: inf or an odd prime");
  cmd->add_option("--radius", o.radius, "radius R >= 1 (rational)");
  cmd->add_option("--witness", o.witness_file,
                  "JSON array of free coordinate values (user-supplied witness)");
  cmd->add_flag("--auto-witness", o.auto_witness,
                "construct the witness automatically (default unless --witness)");
  if (with_chain) {
    cmd->add_flag("--weak-chain", o.weak_chain, "weak genericity chain (default)");
    cmd->add_flag("--main-chain", o.main_chain, "main genericity chain");
  }
  cmd->add_option("--escalations", o.escalations, "precision doublings (default 2)");
  cmd->add_option("--out", o.out, "write the certificate JSON here (atomic)");
}

PipelineOptions make_options(const CommonOpts& o) {
  if (o.main_chain && o.weak_chain)
    throw CLI::ValidationError("--weak-chain and --main-chain are exclusive");
  if (o.auto_witness && !o.witness_file.empty())
    throw CLI::ValidationError("--auto-witness and --witness are exclusive");
  PipelineOptions opt;
  opt.place = Place::from_string(o.place_str);
  Rat R = rat_from_string(o.radius);
  if (R < 1) throw CLI::ValidationError("radius must be >= 1");
  opt.logR = R == 1 ? LogBound(Rat(0)) : ln_enclosure(R, 96);
  opt.chain = o.main_chain ? ChainKind::MAIN : ChainKind::WEAK;
  opt.escalations = o.escalations;
  if (!o.witness_file.empty()) {
    opt.style = FreeStyle::USER;
    nlohmann::json j = nlohmann::json::parse(read_file(o.witness_file));
    for (const auto& v : j) opt.user_values.push_back(rat_from_string(v.get<std::string>()));
  } else {
    opt.style = opt.place.is_archimedean() ? FreeStyle::DECIMAL_PATTERN
                                           : FreeStyle::PADIC_PATTERN;
  }
  return opt;
}

int finish(const Certificate& cert, const CommonOpts& o) {
  std::cout << "procedure: " << cert.procedure << "\n";
  std::cout << "place: " << cert.place.to_string() << "\n";
  print_report(cert.thresholds);
  if (cert.witness) {
    std::cout << "  witness precision: " << cert.witness->precision
              << (cert.place.is_archimedean() ? " bits" : " digits") << "\n";
    std::cout << "  witness exact: " << (cert.witness->all_exact() ? "yes" : "no")
              << "\n";
  }
  if (cert.kron_point)
    std::cout << "  evaluation point: " << rat_to_string(*cert.kron_point)
              << ", value: " << rat_to_string(*cert.kron_value) << "\n";
  std::cout << "verdict: " << verdict_name(cert.verdict) << "\n";
  if (!cert.reason.empty()) std::cout << "reason: " << cert.reason << "\n";
  if (!o.out.empty()) write_file_atomic(o.out, cert.to_json().dump(2) + "\n");
  return cert.verdict == Verdict::INCONCLUSIVE ? 2 : 0;
}

// variable names in order of first appearance (identifiers not preceded by a
// digit-exponent context; '^' exponents are numeric so any identifier is a var)
std::vector<std::string> infer_vars(const std::string& expr) {
  std::vector<std::string> vars;
  for (size_t i = 0; i < expr.size();) {
    if (std::isalpha(static_cast<unsigned char>(expr[i])) || expr[i] == '_') {
      size_t j = i;
      while (j < expr.size() &&
             (std::isalnum(static_cast<unsigned char>(expr[j])) || expr[j] == '_'))
        ++j;
      std::string name = expr.substr(i, j - i);
      bool seen = false;
      for (const auto& v : vars) seen |= (v == name);
      if (!seen) vars.push_back(name);
      i = j;
    } else {
      ++i;
    }
  }
  if (vars.empty()) vars.push_back("x");
  return vars;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* cap = std::getenv("PBE_LOG_PRECISION_CAP"))
    set_log_precision_cap(static_cast<unsigned>(std::strtoul(cap, nullptr, 10)));

  CLI::App app{"pbe: certified proof-by-example for polynomial identities"};
  app.require_subcommand(1);

  CommonOpts o;

  std::string system_path, geo_path, cert_path, expr, vars_csv, selection_csv, mode =
      "certify";
  int dim_arg = -1;
  bool all_perms = false;

  auto* cmd_bounds = app.add_subcommand("bounds", "print the threshold report");
  cmd_bounds->add_option("system", system_path, "system JSON file")->required();
  add_common(cmd_bounds, o);

  auto* cmd_certify = app.add_subcommand("certify", "certify g = 0 on X");
  cmd_certify->add_option("system", system_path, "system JSON file")->required();
  add_common(cmd_certify, o);

  auto* cmd_dich = app.add_subcommand("dichotomy", "decide g = 0 vs g != 0 on X");
  cmd_dich->add_option("system", system_path, "system JSON file")->required();
  add_common(cmd_dich, o);

  auto* cmd_dim = app.add_subcommand("dimension", "confirm dim X by example");
  cmd_dim->add_option("system", system_path, "system JSON file")->required();
  cmd_dim->add_option("--dim", dim_arg, "dimension to confirm (default: asserted)");
  cmd_dim->add_option("--selection", selection_csv,
                      "comma-separated constraint indices (default 0..n-d-1)");
  cmd_dim->add_flag("--all-permutations", all_perms, "check every selection");
  add_common(cmd_dim, o);

  auto* cmd_kron = app.add_subcommand("kronecker", "exact ambient zero test");
  cmd_kron->add_option("poly", expr, "polynomial expression")->required();
  cmd_kron->add_option("--vars", vars_csv, "comma-separated variables (inferred)");
  cmd_kron->add_option("--out", o.out, "write the certificate JSON here");

  auto* cmd_geom = app.add_subcommand("geom", "compile a .geo program and certify");
  cmd_geom->add_option("program", geo_path, ".geo file")->required();
  cmd_geom->add_option("--mode", mode, "certify | dichotomy | dimension");
  add_common(cmd_geom, o);

  auto* cmd_verify = app.add_subcommand("verify", "re-verify a certificate");
  cmd_verify->add_option("certificate", cert_path, "certificate JSON")->required();

  auto* cmd_nss = app.add_subcommand("nss-bounds",
                                     "Nullstellensatz multiplier size bounds");
  cmd_nss->add_option("system", system_path, "system JSON file")->required();
  add_common(cmd_nss, o, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_bounds->parsed()) {
      PolySystem sys = load_system(system_path);
      PipelineOptions opt = make_options(o);
      BoundContext ctx = context_for(sys, opt.place, opt.logR);
      WitnessPlan plan = autopilot(sys, ctx, opt.style, opt.chain, opt.place,
                                   opt.place.is_archimedean() ? 128 : 10,
                                   opt.user_values);
      ThresholdReport rep;
      rep.chain = plan.thresholds;
      rep.log_eps = epsilon_main(ctx, plan.H_with_g);
      rep.aux.emplace_back("H_no_g", plan.H_no_g);
      rep.aux.emplace_back("H_with_g", plan.H_with_g);
      for (size_t i = 0; i < plan.heights.size(); ++i)
        rep.aux.emplace_back("h_p" + std::to_string(i + 1), plan.heights[i]);
      auto [df, dg] = dichotomy_thresholds(ctx, plan.H_with_g);
      rep.aux.emplace_back("dichotomy_eps_f", df);
      rep.aux.emplace_back("dichotomy_eps_g", dg);
      auto [xf, xd] = dimension_thresholds(ctx, plan.H_no_g);
      rep.aux.emplace_back("dimension_eps_f", xf);
      rep.aux.emplace_back("dimension_eps_det", xd);
      std::cout << "threshold report (chain "
                << (opt.chain == ChainKind::MAIN ? "main" : "weak") << ")\n";
      print_report(rep);
      if (!o.out.empty()) write_file_atomic(o.out, rep.to_json().dump(2) + "\n");
      return 0;
    }

    if (cmd_certify->parsed())
      return finish(certify_identity(load_system(system_path), make_options(o)), o);

    if (cmd_dich->parsed())
      return finish(dichotomy_decide(load_system(system_path), make_options(o)), o);

    if (cmd_dim->parsed()) {
      PolySystem sys = load_system(system_path);
      unsigned d = dim_arg >= 0 ? static_cast<unsigned>(dim_arg) : sys.dim;
      std::vector<std::size_t> sel;
      if (!selection_csv.empty()) {
        std::stringstream ss(selection_csv);
        std::string tok;
        while (std::getline(ss, tok, ','))
          sel.push_back(static_cast<std::size_t>(std::stoul(tok)));
      } else if (!all_perms) {
        for (unsigned i = 0; d + i < sys.n(); ++i) sel.push_back(i);
      }
      return finish(dimension_by_example(sys, d, make_options(o), sel, all_perms), o);
    }

    if (cmd_kron->parsed()) {
      std::vector<std::string> vars;
      if (!vars_csv.empty()) {
        std::stringstream ss(vars_csv);
        std::string tok;
        while (std::getline(ss, tok, ',')) vars.push_back(tok);
      } else {
        vars = infer_vars(expr);
      }
      Certificate cert = prove_zero_ambient(parse_poly(expr, vars));
      return finish(cert, o);
    }

    if (cmd_geom->parsed()) {
      GeoProgram prog = parse_geo(read_file(geo_path));
      CompiledSystem cs = compile(prog);
      std::cout << "compiled: n = " << cs.system.n() << ", m = " << cs.system.m()
                << " (" << cs.n_f << " constraints, " << cs.n_e
                << " counting identities, " << cs.n_i << " inequations), d_guess = "
                << cs.d_guess << "\n";
      PipelineOptions opt = make_options(o);
      if (mode == "certify") return finish(certify_identity(cs.system, opt), o);
      if (mode == "dichotomy") return finish(dichotomy_decide(cs.system, opt), o);
      if (mode == "dimension") {
        if (cs.d_guess < 0) {
          std::cerr << "error: overdetermined system, no dimension guess\n";
          return 1;
        }
        unsigned d = static_cast<unsigned>(cs.d_guess);
        std::vector<std::size_t> sel;
        for (unsigned i = 0; d + i < cs.system.n(); ++i) sel.push_back(i);
        return finish(dimension_by_example(cs.system, d, opt, sel), o);
      }
      std::cerr << "error: unknown --mode " << mode << "\n";
      return 1;
    }

    if (cmd_verify->parsed()) {
      VerifyResult r = verify_certificate(nlohmann::json::parse(read_file(cert_path)));
      std::cout << (r.valid ? "VALID" : "INVALID") << "\n";
      if (!r.valid) std::cout << "reason: " << r.reason << "\n";
      return r.valid ? 0 : 2;
    }

    if (cmd_nss->parsed()) {
      PolySystem sys = load_system(system_path);
      PipelineOptions opt = make_options(o);
      BoundContext ctx = context_for(sys, opt.place, opt.logR);
      LogBound H = height_of_polys(sys.f);
      for (NssVariant variant : {NssVariant::BEZOUT, NssVariant::GENERAL}) {
        NssSizeBounds b = nullstellensatz_size_bounds(ctx, H, variant);
        std::cout << (variant == NssVariant::BEZOUT ? "bezout" : "general") << ":\n";
        if (b.N != 0) std::cout << "  N = " << b.N.get_str() << "\n";
        std::cout << "  deg lambda <= " << b.deg_lambda_max.get_str() << "\n";
        std::cout << "  h lambda <= " << fmt_logbound(b.h_lambda_max) << "\n";
      }
      std::cout << "  deg X <= " << bezout_degree_bound(ctx).get_str() << "\n";
      std::cout << "  h(X) <= " << fmt_logbound(variety_height_bound(ctx, H)) << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
