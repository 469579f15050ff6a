#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "wsr/data_harness.hpp"
#include "wsr/metric_learning.hpp"
#include "wsr/presentation.hpp"
#include "wsr/stable_rank.hpp"
#include "wsr/wasserstein.hpp"

namespace {

namespace fs = std::filesystem;

std::string resolve_out_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("WSR_OUTPUT_DIR"); env && *env) return env;
  return ".";
}

double parse_order(const std::string& text) {
  const double v = wsr::parse_double(text);
  if (!(v >= 1.0)) throw CLI::ValidationError("p/q must be >= 1 or 'inf'");
  return v;
}

wsr::Contour load_contour(const std::string& source) {
  if (source.empty() || source == "standard") return wsr::Contour::standard();
  return wsr::Contour::from_json_file(source);
}

void log_config(const std::string& command, const nlohmann::json& config) {
  nlohmann::json j = config;
  j["command"] = command;
  std::cerr << "config: " << j.dump() << "\n";
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << text;
}

void write_distance_matrix_csv(std::ostream& out, const std::vector<std::string>& ids,
                               const std::vector<std::vector<double>>& matrix) {
  out << "id";
  for (const std::string& id : ids) out << "," << id;
  out << "\n";
  for (size_t i = 0; i < ids.size(); ++i) {
    out << ids[i];
    for (size_t j = 0; j < ids.size(); ++j) out << "," << wsr::format_double(matrix[i][j]);
    out << "\n";
  }
}

void print_distance(double value, const std::string& format) {
  if (format == "json")
    std::cout << nlohmann::json{{"distance", wsr::format_double(value)}}.dump() << "\n";
  else
    std::cout << wsr::format_double(value) << "\n";
}

int run(int argc, char** argv) {
  CLI::App app{"Wasserstein stable ranks for persistence modules"};
  app.require_subcommand(1);

  std::string format = "csv";
  app.add_option("--format", format, "machine output format")
      ->check(CLI::IsMember({"csv", "json"}));

  // stable-rank
  auto* sr = app.add_subcommand("stable-rank", "stable rank of a barcode");
  std::string sr_barcode, sr_p = "inf", sr_q = "1", sr_contour = "standard";
  std::string sr_out, sr_csv;
  sr->add_option("--barcode", sr_barcode, "barcode CSV")->required();
  sr->add_option("--p", sr_p, "norm order p (>= 1 or inf)");
  sr->add_option("--q", sr_q, "aggregation order q (>= 1 or inf)");
  sr->add_option("--contour", sr_contour, "'standard' or contour JSON file");
  sr->add_option("--out", sr_out, "write step function JSON here (default stdout)");
  sr->add_option("--csv", sr_csv, "also write the inverse profile CSV here");

  // interleave
  auto* il = app.add_subcommand("interleave", "interleaving distance between stable ranks");
  std::string il_a, il_b, il_p = "inf", il_q = "1", il_contour = "standard";
  il->add_option("--a", il_a, "first barcode CSV")->required();
  il->add_option("--b", il_b, "second barcode CSV")->required();
  il->add_option("--p", il_p, "norm order p");
  il->add_option("--q", il_q, "aggregation order q");
  il->add_option("--contour", il_contour, "'standard' or contour JSON file");

  // wasserstein
  auto* ws = app.add_subcommand("wasserstein", "matching distance between diagrams");
  std::string ws_a, ws_b, ws_p = "2", ws_q, ws_contour = "standard";
  ws->add_option("--a", ws_a, "first barcode CSV")->required();
  ws->add_option("--b", ws_b, "second barcode CSV")->required();
  ws->add_option("--p", ws_p, "norm order p");
  ws->add_option("--q", ws_q, "aggregation order; q != p uses the small-instance solver");
  ws->add_option("--contour", ws_contour, "'standard' or contour JSON file");

  // distance-matrix
  auto* dm = app.add_subcommand("distance-matrix", "pairwise interleaving distances");
  std::string dm_data, dm_p = "inf", dm_q = "1", dm_contour = "standard", dm_theta;
  std::string dm_out;
  int dm_jobs = 1;
  dm->add_option("--data", dm_data, "dataset manifest JSON")->required();
  dm->add_option("--p", dm_p, "norm order p");
  dm->add_option("--q", dm_q, "aggregation order q");
  dm->add_option("--contour", dm_contour, "'standard' or contour JSON file");
  dm->add_option("--theta", dm_theta, "learned parameter JSON (overrides --p/--contour)");
  dm->add_option("--out", dm_out, "output CSV (default stdout)");
  dm->add_option("--jobs", dm_jobs, "parallel workers");

  // persistence
  auto* pe = app.add_subcommand("persistence", "H0 barcode of an image or filtered graph");
  std::string pe_image, pe_vertices, pe_edges, pe_out;
  pe->add_option("--image", pe_image, "PGM image (super-level filtration)");
  pe->add_option("--graph-vertices", pe_vertices, "vertex CSV 'id,value'");
  pe->add_option("--graph-edges", pe_edges, "edge CSV 'u,v'");
  pe->add_option("--out", pe_out, "output barcode CSV (default stdout)");

  // gen-synthetic
  auto* gs = app.add_subcommand("gen-synthetic", "generate a synthetic image dataset");
  int gs_dataset = 1, gs_n = 50;
  uint64_t gs_seed = 0;
  std::string gs_out_dir;
  gs->add_option("--dataset", gs_dataset, "dataset family (1 or 2)")
      ->check(CLI::IsMember({1, 2}));
  gs->add_option("--n", gs_n, "samples per class");
  gs->add_option("--seed", gs_seed, "RNG seed");
  gs->add_option("--out-dir", gs_out_dir, "output directory (default $WSR_OUTPUT_DIR or .)");

  // classify
  auto* cl = app.add_subcommand("classify", "leave-one-out kNN error");
  std::string cl_data, cl_p = "inf", cl_q = "1", cl_contour = "standard", cl_theta;
  int cl_k = 1, cl_jobs = 1;
  cl->add_option("--data", cl_data, "dataset manifest (default <out-dir>/manifest.json)");
  cl->add_option("--p", cl_p, "norm order p");
  cl->add_option("--q", cl_q, "aggregation order q");
  cl->add_option("--contour", cl_contour, "'standard' or contour JSON file");
  cl->add_option("--theta", cl_theta, "learned parameter JSON (overrides --p/--contour)");
  cl->add_option("--k", cl_k, "number of neighbours");
  cl->add_option("--jobs", cl_jobs, "parallel workers");

  // learn-metric
  auto* lm = app.add_subcommand("learn-metric", "optimize the metric parameters");
  std::string lm_data, lm_config, lm_out_dir;
  lm->add_option("--data", lm_data, "dataset manifest JSON")->required();
  lm->add_option("--config", lm_config, "training config JSON")->required();
  lm->add_option("--out-dir", lm_out_dir, "output directory (default $WSR_OUTPUT_DIR or .)");

  // reduce
  auto* rd = app.add_subcommand("reduce", "presentation-matrix reduction demo");
  std::string rd_demo;
  rd->add_option("--demo", rd_demo, "bundled demo input (available: paper)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (sr->parsed()) {
    log_config("stable-rank", {{"barcode", sr_barcode}, {"p", sr_p}, {"q", sr_q},
                               {"contour", sr_contour}});
    wsr::MetricChoice metric(parse_order(sr_p), parse_order(sr_q), load_contour(sr_contour));
    wsr::StepFunction f = wsr::stable_rank(wsr::read_barcode_csv_file(sr_barcode), metric);
    if (sr_out.empty())
      std::cout << f.to_json() << "\n";
    else
      write_text(sr_out, f.to_json() + "\n");
    if (!sr_csv.empty()) write_text(sr_csv, f.inverse_csv());
    return 0;
  }

  if (il->parsed()) {
    log_config("interleave", {{"a", il_a}, {"b", il_b}, {"p", il_p}, {"q", il_q},
                              {"contour", il_contour}});
    wsr::MetricChoice metric(parse_order(il_p), parse_order(il_q), load_contour(il_contour));
    print_distance(wsr::interleaving_fast(wsr::read_barcode_csv_file(il_a),
                                          wsr::read_barcode_csv_file(il_b), metric),
                   format);
    return 0;
  }

  if (ws->parsed()) {
    log_config("wasserstein", {{"a", ws_a}, {"b", ws_b}, {"p", ws_p}, {"q", ws_q},
                               {"contour", ws_contour}});
    const double p = parse_order(ws_p);
    wsr::Contour contour = load_contour(ws_contour);
    wsr::Barcode a = contour.transform(wsr::read_barcode_csv_file(ws_a));
    wsr::Barcode b = contour.transform(wsr::read_barcode_csv_file(ws_b));
    double d;
    if (ws_q.empty() || parse_order(ws_q) == p)
      d = wsr::wasserstein_pp(a, b, p);
    else
      d = wsr::wasserstein_qp_bruteforce(a, b, p, parse_order(ws_q));
    print_distance(d, format);
    return 0;
  }

  if (dm->parsed()) {
    log_config("distance-matrix", {{"data", dm_data}, {"p", dm_p}, {"q", dm_q},
                                   {"contour", dm_contour}, {"theta", dm_theta},
                                   {"jobs", dm_jobs}});
    wsr::LabeledBarcodes data = wsr::load_manifest(dm_data);
    wsr::MetricChoice metric =
        dm_theta.empty()
            ? wsr::MetricChoice(parse_order(dm_p), parse_order(dm_q), load_contour(dm_contour))
            : [&] {
                std::ifstream in(dm_theta);
                if (!in) throw std::invalid_argument("cannot open theta: " + dm_theta);
                std::stringstream ss;
                ss << in.rdbuf();
                return wsr::MetricParams::from_json(ss.str()).metric();
              }();
    auto matrix = wsr::interleaving_distance_matrix(data.barcodes, metric, dm_jobs);
    if (dm_out.empty()) {
      write_distance_matrix_csv(std::cout, data.ids, matrix);
    } else {
      std::ofstream out(dm_out);
      if (!out) throw std::runtime_error("cannot write: " + dm_out);
      write_distance_matrix_csv(out, data.ids, matrix);
    }
    return 0;
  }

  if (pe->parsed()) {
    log_config("persistence", {{"image", pe_image}, {"graph-vertices", pe_vertices},
                               {"graph-edges", pe_edges}});
    wsr::Barcode barcode;
    if (!pe_image.empty()) {
      barcode = wsr::h0_superlevel(wsr::read_pgm(pe_image));
    } else if (!pe_vertices.empty() && !pe_edges.empty()) {
      barcode = wsr::h0_sublevel_graph(wsr::read_filtered_graph(pe_vertices, pe_edges));
    } else {
      throw CLI::ValidationError(
          "persistence: need --image or both --graph-vertices and --graph-edges");
    }
    if (pe_out.empty())
      wsr::write_barcode_csv(std::cout, barcode);
    else
      wsr::write_barcode_csv_file(pe_out, barcode);
    return 0;
  }

  if (gs->parsed()) {
    const std::string dir = resolve_out_dir(gs_out_dir);
    log_config("gen-synthetic", {{"dataset", gs_dataset}, {"n", gs_n}, {"seed", gs_seed},
                                 {"out-dir", dir}});
    wsr::ImageDataset data = gs_dataset == 1 ? wsr::gen_dataset1(gs_n, gs_seed)
                                             : wsr::gen_dataset2(gs_n, gs_seed);
    const std::string manifest = wsr::write_image_dataset(data, dir, gs_seed, gs_dataset);
    std::cout << manifest << "\n";
    return 0;
  }

  if (cl->parsed()) {
    const std::string data_path =
        cl_data.empty() ? (fs::path(resolve_out_dir("")) / "manifest.json").string() : cl_data;
    log_config("classify", {{"data", data_path}, {"p", cl_p}, {"q", cl_q},
                            {"contour", cl_contour}, {"theta", cl_theta}, {"k", cl_k}});
    wsr::LabeledBarcodes data = wsr::load_manifest(data_path);
    wsr::MetricChoice metric =
        cl_theta.empty()
            ? wsr::MetricChoice(parse_order(cl_p), parse_order(cl_q), load_contour(cl_contour))
            : [&] {
                std::ifstream in(cl_theta);
                if (!in) throw std::invalid_argument("cannot open theta: " + cl_theta);
                std::stringstream ss;
                ss << in.rdbuf();
                return wsr::MetricParams::from_json(ss.str()).metric();
              }();
    const double error = wsr::knn_loocv(data, metric, cl_k, cl_jobs);
    if (format == "json")
      std::cout << nlohmann::json{{"error", error}}.dump() << "\n";
    else
      std::cout << wsr::format_double(error) << "\n";
    return 0;
  }

  if (lm->parsed()) {
    const std::string dir = resolve_out_dir(lm_out_dir);
    wsr::TrainConfig config = wsr::TrainConfig::from_json_file(lm_config);
    log_config("learn-metric",
               {{"data", lm_data}, {"config", lm_config}, {"out-dir", dir},
                {"resolved", nlohmann::json::parse(config.to_json())}});
    wsr::LabeledDataset data = wsr::to_labeled_dataset(wsr::load_manifest(lm_data));
    wsr::TrainResult result = wsr::train(data, config);
    fs::create_directories(dir);
    write_text((fs::path(dir) / "trace.csv").string(), result.trace_csv(config.k));
    write_text((fs::path(dir) / "theta_best.json").string(), result.best.to_json() + "\n");
    if (result.aborted) {
      std::cerr << "learn-metric: aborted on non-finite loss; partial trace written\n";
      return 1;
    }
    std::cout << "best_loss " << wsr::format_double(result.best_loss) << "\n";
    return 0;
  }

  if (rd->parsed()) {
    if (rd_demo != "paper")
      throw CLI::ValidationError("reduce: unknown demo '" + rd_demo + "'");
    log_config("reduce", {{"demo", rd_demo}});
    wsr::GeneratorMap f = wsr::demo_monomorphism();
    wsr::PresentationMatrix m = wsr::PresentationMatrix::mono_presentation(f);
    wsr::Reduction reduced = wsr::reduce_columns(m);
    wsr::BarToBarResult btb = wsr::bar_to_bar(m);
    wsr::Reduction reduced_b = wsr::reduce_columns(btb.bar_to_bar);
    std::cout << "M_f:\n" << m.dump() << "\n";
    std::cout << "reduced M_f:\n" << reduced.matrix.dump() << "\n";
    std::cout << "M_b:\n" << btb.bar_to_bar.dump() << "\n";
    std::cout << "r_max:";
    for (int c = 0; c < m.cols(); ++c) {
      if (btb.rmax[c] == -1) continue;
      std::cout << " z" << m.column_label(c).index + 1 << "->r"
                << m.column_label(btb.rmax[c]).index + 1;
    }
    std::cout << "\n";
    std::cout << "sigma_f = " << reduced.sigma.to_string() << "\n";
    std::cout << "sigma_b = " << reduced_b.sigma.to_string() << "\n";
    std::cout << "coker f   : ";
    wsr::write_barcode_csv(std::cout, wsr::cokernel_of(m));
    std::cout << "coker f_b : ";
    wsr::write_barcode_csv(std::cout, wsr::cokernel_of(btb.bar_to_bar));
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
