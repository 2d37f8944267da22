// Command-line front end: synthetic benchmark generation, joint and
// separate unmixing, evaluation reports, and the joint-vs-separate
// comparison table.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "hsdu/hsdu.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GenerateArgs {
  std::string out;
  std::string truth_dir;
  int k = 10, l = 129, width = 50, height = 50, p = 3;
  double sigma_e = 0.05, sigma_v = 0.05, b = 0.01;
  double change_density = 0.05, amplitude = 0.2;
  std::uint64_t seed = 1;
};

void add_generate_flags(CLI::App* cmd, GenerateArgs& a) {
  cmd->add_option("--k", a.k, "number of time frames");
  cmd->add_option("--l", a.l, "number of channels");
  cmd->add_option("--width", a.width, "image width in pixels");
  cmd->add_option("--height", a.height, "image height in pixels");
  cmd->add_option("--p", a.p, "number of sources");
  cmd->add_option("--sigma-e", a.sigma_e, "observation noise std dev");
  cmd->add_option("--sigma-v", a.sigma_v, "spectral distortion std dev");
  cmd->add_option("--b", a.b, "Laplacian scale of abundance changes");
  cmd->add_option("--change-density", a.change_density,
                  "fraction of abundance entries perturbed per transition");
  cmd->add_option("--amplitude", a.amplitude, "scale-factor sinusoid amplitude");
  cmd->add_option("--seed", a.seed, "random seed");
}

std::pair<hsdu::FrameSequence, hsdu::GroundTruth> run_generator(
    const GenerateArgs& a) {
  hsdu::Dims dims{a.k, a.l, a.width * a.height, a.p};
  hsdu::CircleGeometry geom =
      hsdu::CircleGeometry::standard(a.p, a.width, a.height);
  hsdu::NoiseSpec noise{a.sigma_e, a.sigma_v, a.b, a.change_density, a.seed};
  hsdu::GeneratorOptions opts;
  opts.amplitude = a.amplitude;
  return hsdu::generate_synthetic(dims, geom, noise, opts);
}

void write_truth_dir(const std::string& dir, const hsdu::GroundTruth& gt) {
  fs::create_directories(dir);
  hsdu::write_endmembers(dir + "/S.hsts", gt.S);
  hsdu::write_abundances(dir + "/A.hsts", gt.A);
  hsdu::write_csv_matrix(dir + "/psi.csv", gt.psi);
  hsdu::write_csv_matrix(dir + "/s0.csv", gt.S0);
}

void write_estimate_dir(const std::string& dir, const hsdu::UnmixResult& res) {
  fs::create_directories(dir);
  hsdu::write_endmembers(dir + "/S.hsts", res.S);
  hsdu::write_abundances(dir + "/A.hsts", res.A);
  hsdu::write_csv_matrix(dir + "/psi.csv", res.psi);
  for (std::size_t k = 0; k < res.S.size(); ++k)
    hsdu::write_csv_matrix(dir + "/spectra_frame" + std::to_string(k + 1) +
                               ".csv",
                           res.S[k]);
  if (!res.objective_trace.empty()) {
    hsdu::Matrix trace(res.objective_trace.size(), 1);
    for (std::size_t i = 0; i < res.objective_trace.size(); ++i)
      trace(i, 0) = res.objective_trace[i];
    hsdu::write_csv_matrix(dir + "/objective_trace.csv", trace);
  }
}

std::vector<double> parse_lambda_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
  if (out.empty()) throw hsdu::ConfigError("--lambda-s: empty list");
  return out;
}

double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / v.size();
}

double stddev(const std::vector<double>& v) {
  double m = mean(v), s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / v.size());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint spectral unmixing of multitemporal hyperspectral "
               "image sequences"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* cmd_gen = app.add_subcommand("generate", "write a synthetic benchmark");
  cmd_gen->add_option("--out", gen.out, "output sequence path (.hsts)")
      ->required();
  cmd_gen->add_option("--truth-dir", gen.truth_dir,
                      "directory for ground-truth files");
  add_generate_flags(cmd_gen, gen);

  struct {
    std::string in, s0, out_dir, init = "default", truth_dir;
    std::string lambda_s = "1.0";
    double lambda_a = 0.25, rho = 1.0, eps_s = 1e-6, eps_a = 1e-6;
    int max_outer = 200, max_inner = 500;
  } joint;
  auto* cmd_joint = app.add_subcommand("unmix-joint", "joint ANLS unmixing");
  cmd_joint->add_option("--in", joint.in, "input sequence (.hsts)")->required();
  cmd_joint->add_option("--s0", joint.s0, "reference spectra CSV (L x P)")
      ->required();
  cmd_joint->add_option("--lambda-s", joint.lambda_s,
                        "spectral weight, scalar or comma list");
  cmd_joint->add_option("--lambda-a", joint.lambda_a, "abundance-change weight");
  cmd_joint->add_option("--rho", joint.rho, "ADMM barrier parameter");
  cmd_joint->add_option("--eps-s", joint.eps_s, "outer tolerance on S");
  cmd_joint->add_option("--eps-a", joint.eps_a, "outer tolerance on A");
  cmd_joint->add_option("--max-outer", joint.max_outer, "outer iteration cap");
  cmd_joint->add_option("--max-inner", joint.max_inner, "ADMM iteration cap");
  cmd_joint->add_option("--init", joint.init, "default or truth-dir");
  cmd_joint->add_option("--truth-dir", joint.truth_dir,
                        "truth directory for --init truth-dir");
  cmd_joint->add_option("--out-dir", joint.out_dir, "output directory")
      ->required();

  struct {
    std::string in, s_ref, out_dir;
    int p = 3;
    std::uint64_t seed = 1;
  } sep;
  auto* cmd_sep = app.add_subcommand("unmix-separate",
                                     "frame-by-frame baseline unmixing");
  cmd_sep->add_option("--in", sep.in, "input sequence (.hsts)")->required();
  cmd_sep->add_option("--p", sep.p, "number of sources")->required();
  cmd_sep->add_option("--s-ref", sep.s_ref, "alignment reference CSV (L x P)")
      ->required();
  cmd_sep->add_option("--seed", sep.seed, "extraction seed");
  cmd_sep->add_option("--out-dir", sep.out_dir, "output directory")->required();

  struct {
    std::string est_dir, truth_dir, report;
  } eval;
  auto* cmd_eval = app.add_subcommand("evaluate", "scaled-MSE report");
  cmd_eval->add_option("--est-dir", eval.est_dir, "estimate directory")
      ->required();
  cmd_eval->add_option("--truth-dir", eval.truth_dir, "truth directory")
      ->required();
  cmd_eval->add_option("--report", eval.report, "JSON report path")->required();

  GenerateArgs cmp;
  int trials = 10;
  std::string cmp_out;
  auto* cmd_cmp = app.add_subcommand(
      "compare", "joint vs separate over several seeded trials");
  cmd_cmp->add_option("--trials", trials, "number of seeded trials");
  cmd_cmp->add_option("--out", cmp_out, "output CSV path")->required();
  add_generate_flags(cmd_cmp, cmp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  try {
    if (*cmd_gen) {
      auto [X, gt] = run_generator(gen);
      hsdu::write_sequence(gen.out, X);
      if (!gen.truth_dir.empty()) write_truth_dir(gen.truth_dir, gt);
    } else if (*cmd_joint) {
      hsdu::FrameSequence X = hsdu::read_sequence(joint.in);
      hsdu::ReferenceSpectra S0 = hsdu::read_csv_matrix(joint.s0);
      X.dims.P = static_cast<int>(S0.cols());
      hsdu::SolverConfig cfg;
      cfg.h.lambda_S = parse_lambda_list(joint.lambda_s);
      cfg.h.lambda_A = joint.lambda_a;
      cfg.h.rho = joint.rho;
      cfg.h.eps_S = joint.eps_s;
      cfg.h.eps_A = joint.eps_a;
      cfg.h.max_outer = joint.max_outer;
      cfg.h.max_inner = joint.max_inner;
      if (joint.init == "truth-dir") {
        if (joint.truth_dir.empty())
          throw hsdu::ConfigError("--init truth-dir requires --truth-dir");
        hsdu::Initialization init;
        init.S = hsdu::read_endmembers(joint.truth_dir + "/S.hsts");
        init.A = hsdu::read_abundances(joint.truth_dir + "/A.hsts");
        init.psi = hsdu::read_csv_matrix(joint.truth_dir + "/psi.csv");
        cfg.init = std::move(init);
      } else if (joint.init != "default") {
        throw hsdu::ConfigError("--init must be 'default' or 'truth-dir'");
      }
      hsdu::UnmixResult res = hsdu::joint_unmix(X, S0, cfg);
      write_estimate_dir(joint.out_dir, res);
    } else if (*cmd_sep) {
      hsdu::FrameSequence X = hsdu::read_sequence(sep.in);
      hsdu::ReferenceSpectra S_ref = hsdu::read_csv_matrix(sep.s_ref);
      X.dims.P = sep.p;
      hsdu::UnmixResult res = hsdu::separate_unmix(X, sep.p, S_ref, sep.seed);
      write_estimate_dir(sep.out_dir, res);
    } else if (*cmd_eval) {
      hsdu::GroundTruth gt;
      gt.S = hsdu::read_endmembers(eval.truth_dir + "/S.hsts");
      gt.A = hsdu::read_abundances(eval.truth_dir + "/A.hsts");
      gt.psi = hsdu::read_csv_matrix(eval.truth_dir + "/psi.csv");
      gt.S0 = hsdu::read_csv_matrix(eval.truth_dir + "/s0.csv");
      hsdu::EndmemberTrajectory S = hsdu::read_endmembers(eval.est_dir + "/S.hsts");
      hsdu::AbundanceTrajectory A = hsdu::read_abundances(eval.est_dir + "/A.hsts");
      hsdu::ScaleSeries psi = hsdu::read_csv_matrix(eval.est_dir + "/psi.csv");
      hsdu::EvalReport rep = hsdu::evaluate_estimate(S, A, psi, gt);
      json out{{"e_S", rep.e_S},
               {"e_A", rep.e_A},
               {"e_psi", rep.e_psi},
               {"e_S_per_frame", rep.e_S_per_frame},
               {"e_A_per_frame", rep.e_A_per_frame},
               {"config",
                {{"est_dir", eval.est_dir}, {"truth_dir", eval.truth_dir}}}};
      std::vector<std::vector<double>> angles;
      for (Eigen::Index p = 0; p < rep.angle_table.rows(); ++p)
        angles.emplace_back(rep.angle_table.row(p).begin(),
                            rep.angle_table.row(p).end());
      out["spectral_angles"] = angles;
      std::ofstream rf(eval.report);
      if (!rf) throw hsdu::FormatError("cannot write report " + eval.report);
      rf << out.dump(2) << "\n";
    } else if (*cmd_cmp) {
      auto [lambda_s, lambda_a] =
          hsdu::tune_hyperparameters(cmp.sigma_e, cmp.sigma_v, cmp.b);
      std::ofstream out(cmp_out);
      if (!out) throw hsdu::FormatError("cannot write " + cmp_out);
      out << "trial,seed,joint_e_S,joint_e_A,joint_e_psi,"
             "separate_e_S,separate_e_A,separate_e_psi\n";
      std::vector<double> je_S, je_A, se_S, se_A;
      for (int t = 0; t < trials; ++t) {
        GenerateArgs trial = cmp;
        trial.seed = cmp.seed + t;
        auto [X, gt] = run_generator(trial);

        hsdu::SolverConfig cfg;
        cfg.h.lambda_S = {lambda_s};
        cfg.h.lambda_A = lambda_a;
        hsdu::UnmixResult jres = hsdu::joint_unmix(X, gt.S0, cfg);
        hsdu::EvalReport jrep =
            hsdu::evaluate_estimate(jres.S, jres.A, jres.psi, gt);

        hsdu::UnmixResult sres =
            hsdu::separate_unmix(X, trial.p, gt.S0, trial.seed);
        hsdu::EvalReport srep =
            hsdu::evaluate_estimate(sres.S, sres.A, sres.psi, gt);

        je_S.push_back(jrep.e_S);
        je_A.push_back(jrep.e_A);
        se_S.push_back(srep.e_S);
        se_A.push_back(srep.e_A);
        out << t + 1 << "," << trial.seed << ","
            << hsdu::format_double(jrep.e_S) << ","
            << hsdu::format_double(jrep.e_A) << ","
            << hsdu::format_double(jrep.e_psi) << ","
            << hsdu::format_double(srep.e_S) << ","
            << hsdu::format_double(srep.e_A) << ","
            << hsdu::format_double(srep.e_psi) << "\n";
        std::cerr << "trial " << t + 1 << "/" << trials
                  << ": joint e_S=" << jrep.e_S << " e_A=" << jrep.e_A
                  << " | separate e_S=" << srep.e_S << " e_A=" << srep.e_A
                  << "\n";
      }
      out << "mean,," << hsdu::format_double(mean(je_S)) << ","
          << hsdu::format_double(mean(je_A)) << ",,"
          << hsdu::format_double(mean(se_S)) << ","
          << hsdu::format_double(mean(se_A)) << ",\n";
      out << "std,," << hsdu::format_double(stddev(je_S)) << ","
          << hsdu::format_double(stddev(je_A)) << ",,"
          << hsdu::format_double(stddev(se_S)) << ","
          << hsdu::format_double(stddev(se_A)) << ",\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
