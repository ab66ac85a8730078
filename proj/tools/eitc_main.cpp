// Command-line pipeline: mesh/data generation, denoiser training,
// diffusion and low-rank completion, linearized reconstruction, evaluation,
// theory checks and plot emission. One shared config file (key = value) plus
// flag overrides; the master seed is split per stage so every stage is
// reproducible in isolation.
//
// Exit codes: 0 success, 2 config error, 3 missing inputs, 4 numerical
// failure.

#include "eitc/dataset.hpp"
#include "eitc/inverse.hpp"
#include "eitc/io_util.hpp"
#include "eitc/lowrank.hpp"
#include "eitc/measurements.hpp"
#include "eitc/mesh.hpp"
#include "eitc/metrics.hpp"
#include "eitc/phantoms.hpp"
#include "eitc/sampler.hpp"
#include "eitc/theory.hpp"
#include "eitc/train.hpp"
#include "eitc/vecmat.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;
using namespace eitc;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitMissing = 3;
constexpr int kExitNumerical = 4;

struct PipelineConfig {
    int n_boundary = 32;
    int n_rings = 0; // 0: derived from n_boundary
    int grid_size = 128;
    int samples = 200;
    std::uint64_t seed = 1;

    int T = 200;
    double beta_min = 1e-4;
    double beta_max = 0.08;
    int base_width = 16;
    int t_embed_dim = 32;

    double lr = 1e-4;
    double weight_decay = 1e-4;
    double ema_decay = 0.999;
    double clip_norm = 0.0;
    int steps = 2000;
    int batch = 32;

    std::string mask_kind = "principal";
    double mask_rate = 0.01;
    double mask_rate_max = -1.0; // training only: log-uniform rate range
    int mask_level = 3;
    double mask_s_offdiag = 0.15;
    double sigma_noise = 0.0;
    int n_post = 4;
    double lambda_reg = -1.0;

    int rings() const { return n_rings > 0 ? n_rings : default_ring_count(n_boundary); }

    std::string canonical() const {
        std::ostringstream ss;
        ss << "n_boundary=" << n_boundary << ";n_rings=" << rings() << ";grid_size=" << grid_size
           << ";samples=" << samples << ";seed=" << seed << ";T=" << T << ";beta_min=" << beta_min
           << ";beta_max=" << beta_max << ";base_width=" << base_width
           << ";t_embed_dim=" << t_embed_dim << ";lr=" << lr << ";weight_decay=" << weight_decay
           << ";ema_decay=" << ema_decay << ";clip_norm=" << clip_norm << ";steps=" << steps
           << ";batch=" << batch << ";mask_kind=" << mask_kind << ";mask_rate=" << mask_rate
           << ";mask_rate_max=" << mask_rate_max
           << ";mask_level=" << mask_level << ";mask_s_offdiag=" << mask_s_offdiag
           << ";sigma_noise=" << sigma_noise << ";n_post=" << n_post
           << ";lambda_reg=" << lambda_reg;
        return ss.str();
    }
    std::uint64_t hash() const { return fnv1a(canonical()); }
};

void apply_config_file(PipelineConfig& cfg, const std::string& path) {
    const std::string text = read_text_file(path);
    std::istringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
        };
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        try {
            if (key == "n_boundary") cfg.n_boundary = std::stoi(val);
            else if (key == "n_rings") cfg.n_rings = std::stoi(val);
            else if (key == "grid_size") cfg.grid_size = std::stoi(val);
            else if (key == "samples") cfg.samples = std::stoi(val);
            else if (key == "seed") cfg.seed = std::stoull(val);
            else if (key == "T") cfg.T = std::stoi(val);
            else if (key == "beta_min") cfg.beta_min = std::stod(val);
            else if (key == "beta_max") cfg.beta_max = std::stod(val);
            else if (key == "base_width") cfg.base_width = std::stoi(val);
            else if (key == "t_embed_dim") cfg.t_embed_dim = std::stoi(val);
            else if (key == "lr") cfg.lr = std::stod(val);
            else if (key == "weight_decay") cfg.weight_decay = std::stod(val);
            else if (key == "ema_decay") cfg.ema_decay = std::stod(val);
            else if (key == "clip_norm") cfg.clip_norm = std::stod(val);
            else if (key == "steps") cfg.steps = std::stoi(val);
            else if (key == "batch") cfg.batch = std::stoi(val);
            else if (key == "mask_kind") cfg.mask_kind = val;
            else if (key == "mask_rate") cfg.mask_rate = std::stod(val);
            else if (key == "mask_rate_max") cfg.mask_rate_max = std::stod(val);
            else if (key == "mask_level") cfg.mask_level = std::stoi(val);
            else if (key == "mask_s_offdiag") cfg.mask_s_offdiag = std::stod(val);
            else if (key == "sigma_noise") cfg.sigma_noise = std::stod(val);
            else if (key == "n_post") cfg.n_post = std::stoi(val);
            else if (key == "lambda_reg") cfg.lambda_reg = std::stod(val);
            else throw std::invalid_argument("unknown config key: " + key);
        } catch (const std::invalid_argument&) {
            throw;
        } catch (const std::exception&) {
            throw std::invalid_argument(path + ": bad value for " + key + ": " + val);
        }
    }
}

void require_input(const std::string& path, const std::string& producer) {
    if (!file_exists(path))
        throw std::system_error(std::make_error_code(std::errc::no_such_file_or_directory),
                                "missing " + path + " (produce it with `eitc " + producer + "`)");
}

struct LoadedDataset {
    DatasetManifest manifest;
    std::vector<SampleRecord> records;
    Eigen::MatrixXd background;
    TriMesh mesh;
};

LoadedDataset load_dataset(const std::string& dir, int limit = -1) {
    require_input(dir + "/manifest.txt", "gen-data");
    LoadedDataset ds;
    ds.manifest = DatasetManifest::from_text(read_text_file(dir + "/manifest.txt"));
    require_input(dir + "/mesh.bin", "gen-data");
    require_input(dir + "/background_dtn.bin", "gen-data");
    ds.mesh = load_mesh(dir + "/mesh.bin");
    ds.background = load_matrix(dir + "/background_dtn.bin");
    const int n = limit > 0 ? std::min(limit, ds.manifest.n_samples) : ds.manifest.n_samples;
    for (int i = 0; i < n; ++i) {
        const std::string p = sample_path(dir + "/samples", i);
        require_input(p, "gen-data");
        ds.records.push_back(load_sample(p));
    }
    return ds;
}

void write_stage_manifest(const std::string& dir, const PipelineConfig& cfg,
                          const std::map<std::string, std::string>& extra) {
    std::ostringstream ss;
    ss << "eitc stage manifest v1\n";
    ss << "config_hash = " << cfg.hash() << "\n";
    ss << "seed = " << cfg.seed << "\n";
    for (const auto& [k, v] : extra) ss << k << " = " << v << "\n";
    write_text_file(dir + "/manifest.txt", ss.str());
}

std::map<std::string, std::string> read_stage_manifest(const std::string& dir) {
    std::map<std::string, std::string> kv;
    if (!file_exists(dir + "/manifest.txt")) return kv;
    std::istringstream ss(read_text_file(dir + "/manifest.txt"));
    std::string line;
    while (std::getline(ss, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

Mask draw_stage_mask(const PipelineConfig& cfg, int sample_index) {
    const std::uint64_t mask_seed = split_seed(cfg.seed, "mask", sample_index);
    const MaskKind kind = mask_kind_from_name(cfg.mask_kind);
    switch (kind) {
        case MaskKind::Principal: return mask_principal(cfg.n_boundary, cfg.mask_rate, mask_seed);
        case MaskKind::Random: return mask_random(cfg.n_boundary, cfg.mask_rate, mask_seed);
        case MaskKind::Hierarchical:
            return mask_hierarchical(cfg.n_boundary, cfg.mask_level, cfg.mask_s_offdiag, mask_seed);
    }
    throw std::invalid_argument("unknown mask kind");
}

/// Observed normalized measurement of record i, with optional noise injected
/// into the raw table before normalization.
Eigen::MatrixXd noisy_normalized(const SampleRecord& rec, const Eigen::MatrixXd& background,
                                 const PipelineConfig& cfg, int sample_index) {
    if (cfg.sigma_noise == 0.0) return rec.dtn_normalized;
    DtNMatrix raw{rec.dtn_raw, false};
    DtNMatrix bg{background, false};
    const DtNMatrix noisy =
        inject_noise(raw, bg, cfg.sigma_noise, split_seed(cfg.seed, "noise", sample_index));
    return normalize(noisy, bg).values;
}

// ---------------------------------------------------------------- gen-mesh

int cmd_gen_mesh(const PipelineConfig& cfg, const std::string& out) {
    const TriMesh mesh = build_disk_mesh(cfg.n_boundary, cfg.rings());
    save_mesh(mesh, out);
    std::printf("mesh: %d boundary, %d interior, %d triangles -> %s\n", mesh.n_boundary(),
                mesh.n_interior(), mesh.n_triangles(), out.c_str());
    return 0;
}

// ---------------------------------------------------------------- gen-data

int cmd_gen_data(const PipelineConfig& cfg, const std::string& out) {
    fs::create_directories(out + "/samples");
    const TriMesh mesh = build_disk_mesh(cfg.n_boundary, cfg.rings());
    save_mesh(mesh, out + "/mesh.bin");

    ConductivityField ones{Eigen::VectorXd::Ones(mesh.n_triangles())};
    const DtNMatrix background = dtn_matrix(mesh, ones);
    save_matrix(background.values, out + "/background_dtn.bin");

    for (int i = 0; i < cfg.samples; ++i) {
        const std::uint64_t seed = split_seed(cfg.seed, "phantom", i);
        const int n_inclusions = 2 + int(Rng(split_seed(cfg.seed, "ninc", i)).uniform_int(0, 3));
        SampleRecord rec;
        rec.spec = sample_disks(seed, n_inclusions);
        const ConductivityField gamma = to_conductivity(rec.spec, mesh);
        const DtNMatrix raw = dtn_matrix(mesh, gamma);
        rec.dtn_raw = raw.values;
        rec.dtn_normalized = normalize(raw, background).values;
        rec.image = rasterize(mesh, gamma, cfg.grid_size);
        save_sample(rec, sample_path(out + "/samples", i));
    }

    DatasetManifest manifest;
    manifest.n_samples = cfg.samples;
    manifest.n_boundary = cfg.n_boundary;
    manifest.n_rings = cfg.rings();
    manifest.grid_size = cfg.grid_size;
    manifest.master_seed = cfg.seed;
    manifest.config_hash = cfg.hash();
    write_text_file(out + "/manifest.txt", manifest.to_text());
    std::printf("wrote %d samples to %s\n", cfg.samples, out.c_str());
    return 0;
}

// -------------------------------------------------------------------- train

int cmd_train(const PipelineConfig& cfg, const std::string& data_dir, const std::string& out) {
    const LoadedDataset ds = load_dataset(data_dir);
    std::vector<Eigen::MatrixXd> all;
    for (int i = 0; i < int(ds.records.size()); ++i)
        all.push_back(noisy_normalized(ds.records[i], ds.background, cfg, i));

    // Hold out a small tail split for the before/after loss comparison.
    std::vector<Eigen::MatrixXd> train_set = all, holdout;
    if (int(all.size()) >= 16) {
        holdout.assign(all.end() - 8, all.end());
        train_set.assign(all.begin(), all.end() - 8);
    }

    const NoiseSchedule schedule = make_schedule(cfg.T, cfg.beta_min, cfg.beta_max);
    ConvDenoiserConfig arch{ds.manifest.n_boundary, cfg.base_width, cfg.t_embed_dim};
    ConvDenoiser model(arch, schedule, split_seed(cfg.seed, "init"));

    MaskDistribution masks;
    masks.kind = mask_kind_from_name(cfg.mask_kind);
    masks.rate = cfg.mask_rate;
    masks.rate_max = cfg.mask_rate_max;
    masks.level = cfg.mask_level;
    masks.s_offdiag = cfg.mask_s_offdiag;

    OptimizerConfig opt;
    opt.lr = cfg.lr;
    opt.weight_decay = cfg.weight_decay;
    opt.ema_decay = cfg.ema_decay;
    opt.clip_norm = cfg.clip_norm;
    opt.steps = cfg.steps;

    const TrainResult res = train(train_set, masks, schedule, model, opt, cfg.batch,
                                  split_seed(cfg.seed, "train"),
                                  holdout.empty() ? nullptr : &holdout);

    Checkpoint ckpt;
    ckpt.arch = arch;
    ckpt.T = cfg.T;
    ckpt.beta_min = cfg.beta_min;
    ckpt.beta_max = cfg.beta_max;
    ckpt.manifest_hash = fnv1a(read_text_file(data_dir + "/manifest.txt"));
    ckpt.theta = res.theta;
    ckpt.theta_ema = res.theta_ema;
    save_checkpoint(ckpt, out);

    std::ostringstream csv;
    csv << "step,loss\n";
    for (const auto& [step, loss] : res.loss_trace) csv << step << "," << loss << "\n";
    write_text_file(out + ".losses.csv", csv.str());

    std::printf("trained %d steps; holdout loss %.6g -> %.6g; checkpoint %s\n", cfg.steps,
                res.holdout_initial, res.holdout_final, out.c_str());
    if (!holdout.empty() && !(res.holdout_final < res.holdout_initial))
        std::fprintf(stderr, "warning: held-out loss did not decrease\n");
    return 0;
}

// ----------------------------------------------------------------- complete

int cmd_complete(const PipelineConfig& cfg, const std::string& data_dir, const std::string& ckpt_path,
                 const std::string& out, int limit) {
    const LoadedDataset ds = load_dataset(data_dir, limit);
    require_input(ckpt_path, "train");
    const Checkpoint ckpt = load_checkpoint(ckpt_path);
    if (ckpt.arch.n_side != ds.manifest.n_boundary)
        throw std::runtime_error("checkpoint N_B=" + std::to_string(ckpt.arch.n_side) +
                                 " does not match dataset N_B=" +
                                 std::to_string(ds.manifest.n_boundary));

    const NoiseSchedule schedule = make_schedule(ckpt.T, ckpt.beta_min, ckpt.beta_max);
    ConvDenoiser model(ckpt.arch, schedule, 0);
    model.params() = ckpt.theta_ema;
    model.set_internal_parallelism(false); // chains run in parallel instead

    fs::create_directories(out);
    std::ostringstream csv;
    csv << "sample,re\n";
    double rate_sum = 0.0, re_sum = 0.0;
    for (int i = 0; i < int(ds.records.size()); ++i) {
        const Mask mask = draw_stage_mask(cfg, i);
        const Eigen::MatrixXd truth = noisy_normalized(ds.records[i], ds.background, cfg, i);
        const Eigen::MatrixXd observed = apply_mask(truth, mask);
        const Eigen::MatrixXd completed =
            posterior_mean(observed, mask, model, schedule, cfg.n_post,
                           split_seed(cfg.seed, "sample", i));
        save_mask(mask, out + "/" + "mask_" + std::to_string(i) + ".bin");
        save_matrix(completed, out + "/completed_" + std::to_string(i) + ".bin");
        const double re = re_frobenius(completed, ds.records[i].dtn_normalized);
        csv << i << "," << re << "\n";
        re_sum += re;
        rate_sum += mask.realized_rate();
    }
    write_text_file(out + "/re.csv", csv.str());
    write_stage_manifest(out, cfg,
                         {{"stage", "complete"},
                          {"samples", std::to_string(ds.records.size())},
                          {"rate", std::to_string(rate_sum / ds.records.size())},
                          {"mask_kind", cfg.mask_kind}});
    std::printf("completed %d samples, mean RE %.4f -> %s\n", int(ds.records.size()),
                re_sum / ds.records.size(), out.c_str());
    return 0;
}

// -------------------------------------------------------- baseline-complete

int cmd_baseline_complete(const PipelineConfig& cfg, const std::string& data_dir,
                          const std::string& out, int limit) {
    const LoadedDataset ds = load_dataset(data_dir, limit);
    fs::create_directories(out);
    std::ostringstream csv;
    csv << "sample,re,converged\n";
    double rate_sum = 0.0, re_sum = 0.0;
    for (int i = 0; i < int(ds.records.size()); ++i) {
        const Mask mask = draw_stage_mask(cfg, i);
        const Eigen::MatrixXd truth = noisy_normalized(ds.records[i], ds.background, cfg, i);
        const Eigen::MatrixXd observed = apply_mask(truth, mask);
        const HierarchicalResult res =
            (mask.kind == MaskKind::Hierarchical)
                ? complete_hierarchical(observed, mask, cfg.mask_level)
                : complete_blockwise(observed, mask.m, cfg.mask_level);
        save_mask(mask, out + "/" + "mask_" + std::to_string(i) + ".bin");
        save_matrix(res.completed, out + "/completed_" + std::to_string(i) + ".bin");
        const double re = re_frobenius(res.completed, ds.records[i].dtn_normalized);
        csv << i << "," << re << "," << (res.all_converged ? 1 : 0) << "\n";
        re_sum += re;
        rate_sum += mask.realized_rate();
    }
    write_text_file(out + "/re.csv", csv.str());
    write_stage_manifest(out, cfg,
                         {{"stage", "baseline-complete"},
                          {"samples", std::to_string(ds.records.size())},
                          {"rate", std::to_string(rate_sum / ds.records.size())},
                          {"mask_kind", cfg.mask_kind}});
    std::printf("baseline-completed %d samples, mean RE %.4f -> %s\n", int(ds.records.size()),
                re_sum / ds.records.size(), out.c_str());
    return 0;
}

// -------------------------------------------------------------- reconstruct

int cmd_reconstruct(const PipelineConfig& cfg, const std::string& data_dir,
                    const std::string& method, const std::string& completed_dir,
                    const std::string& out, int limit) {
    const LoadedDataset ds = load_dataset(data_dir, limit);
    const SensitivityMatrix J = sensitivity(ds.mesh);
    ReconstructOptions ropts;
    ropts.lambda_reg = cfg.lambda_reg;

    const bool needs_completed = (method == "diffusion" || method == "baseline");
    const bool needs_mask = needs_completed || method == "zero-fill";
    if (needs_mask && completed_dir.empty())
        throw std::invalid_argument("method '" + method + "' needs --completed DIR");

    fs::create_directories(out);
    DtNMatrix background{ds.background, false};
    std::ostringstream csv;
    csv << "sample,re,mae,ssim\n";
    double rate = 1.0;
    if (needs_mask) {
        const auto kv = read_stage_manifest(completed_dir);
        if (auto it = kv.find("rate"); it != kv.end()) rate = std::stod(it->second);
    }
    for (int i = 0; i < int(ds.records.size()); ++i) {
        Eigen::MatrixXd dtn_hat; // raw scale
        if (method == "full") {
            dtn_hat = ds.records[i].dtn_raw;
        } else {
            Eigen::MatrixXd normalized;
            if (method == "zero-fill") {
                const std::string mp = completed_dir + "/mask_" + std::to_string(i) + ".bin";
                require_input(mp, "complete");
                const Mask mask = load_mask(mp);
                normalized =
                    apply_mask(noisy_normalized(ds.records[i], ds.background, cfg, i), mask);
            } else {
                const std::string cp = completed_dir + "/completed_" + std::to_string(i) + ".bin";
                require_input(cp, method == "baseline" ? "baseline-complete" : "complete");
                normalized = load_matrix(cp);
            }
            dtn_hat = denormalize(NormalizedDtN{normalized}, background).values;
        }
        const ConductivityField gamma = reconstruct(dtn_hat, ds.background, J, ropts);
        const GridImage img = rasterize(ds.mesh, gamma, ds.manifest.grid_size);
        save_matrix(grid_to_matrix(img), out + "/recon_" + std::to_string(i) + ".bin");
        const ConductivityErrors err = conductivity_errors(img, ds.records[i].image);
        const double s = ssim_default(img, ds.records[i].image);
        csv << i << "," << err.re << "," << err.mae << "," << s << "\n";
    }
    write_text_file(out + "/metrics.csv", csv.str());
    write_stage_manifest(out, cfg,
                         {{"stage", "reconstruct"},
                          {"method", method},
                          {"samples", std::to_string(ds.records.size())},
                          {"rate", std::to_string(rate)}});
    std::printf("reconstructed %d samples (%s) -> %s\n", int(ds.records.size()), method.c_str(),
                out.c_str());
    return 0;
}

// ----------------------------------------------------------------- evaluate

int cmd_evaluate(const std::string& data_dir, const std::vector<std::string>& method_dirs,
                 const std::string& out) {
    const LoadedDataset ds = load_dataset(data_dir);
    std::vector<std::string> methods;
    std::map<std::string, std::vector<ConductivityErrors>> cond;
    std::map<std::string, std::vector<double>> ssims;
    std::map<std::string, double> rates;
    for (const auto& spec : method_dirs) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("--recon expects method=dir, got: " + spec);
        const std::string method = spec.substr(0, eq);
        const std::string dir = spec.substr(eq + 1);
        methods.push_back(method);
        if (!file_exists(dir + "/metrics.csv")) continue; // reported as missing
        const auto kv = read_stage_manifest(dir);
        if (auto it = kv.find("rate"); it != kv.end()) rates[method] = std::stod(it->second);
        std::istringstream ss(read_text_file(dir + "/metrics.csv"));
        std::string line;
        std::getline(ss, line); // header
        while (std::getline(ss, line)) {
            int idx;
            ConductivityErrors e;
            double s;
            if (std::sscanf(line.c_str(), "%d,%lf,%lf,%lf", &idx, &e.re, &e.mae, &s) == 4) {
                cond[method].push_back(e);
                ssims[method].push_back(s);
            }
        }
    }
    const EvaluationReport rep = evaluation_report(methods, cond, ssims, rates);
    write_text_file(out, rep.to_csv());
    std::cout << rep.to_table();
    std::printf("report -> %s\n", out.c_str());
    return 0;
}

// ------------------------------------------------------------- theory-check

int cmd_theory_check(const PipelineConfig& cfg, const std::string& out, int nv, int n_sweep,
                     int n_cover, int n_probes, double step) {
    fs::create_directories(out);
    PolygonClassParams params;
    Rng rng(split_seed(cfg.seed, "theory"));
    int failures = 0;

    // Bound sweeps over random admissible polygons and perturbations.
    std::ostringstream haus_csv, sym_csv;
    haus_csv << "case,d_hausdorff,bound,pass\n";
    sym_csv << "case,symdiff_area,bound,pass\n";
    for (int c = 0; c < n_sweep; ++c) {
        auto base = sample_admissible_polygon(rng, nv, params);
        if (!base) throw std::runtime_error("could not sample an admissible polygon");
        PolygonSpec pert = *base;
        const double delta = rng.uniform(1e-4, 0.05);
        for (auto& v : pert.vertices) {
            const double a = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
            v.x += delta * std::cos(a);
            v.y += delta * std::sin(a);
        }
        if (!polygon_admissible(pert, params, true).admissible) {
            --c; // resample: perturbation left the relaxed class
            continue;
        }
        const BoundCheck h = hausdorff_poly_bound(*base, pert);
        const BoundCheck s = symdiff_bound(*base, pert);
        haus_csv << c << "," << h.value << "," << h.bound << "," << h.pass << "\n";
        sym_csv << c << "," << s.value << "," << s.bound << "," << s.pass << "\n";
        failures += (!h.pass) + (!s.pass);
    }
    write_text_file(out + "/hausdorff_sweep.csv", haus_csv.str());
    write_text_file(out + "/symdiff_sweep.csv", sym_csv.str());

    // Lipschitz probes on the base and a refined mesh.
    const TriMesh mesh1 = build_disk_mesh(cfg.n_boundary, cfg.rings());
    const TriMesh mesh2 = build_disk_mesh(2 * cfg.n_boundary, default_ring_count(2 * cfg.n_boundary));
    auto base = sample_admissible_polygon(rng, nv, params);
    if (!base) throw std::runtime_error("could not sample an admissible polygon");
    const LipschitzReport lip1 = empirical_lipschitz(mesh1, *base, n_probes, step, params,
                                                     split_seed(cfg.seed, "lip", 1));
    const LipschitzReport lip2 = empirical_lipschitz(mesh2, *base, n_probes, step, params,
                                                     split_seed(cfg.seed, "lip", 2));
    std::ostringstream lip_csv;
    lip_csv << "probe,ratio_base,ratio_refined\n";
    for (int i = 0; i < std::min(lip1.probes_used, lip2.probes_used); ++i)
        lip_csv << i << "," << lip1.ratios[i] << "," << lip2.ratios[i] << "\n";
    write_text_file(out + "/lipschitz.csv", lip_csv.str());
    const double refine_factor = lip2.max_ratio / lip1.max_ratio;
    const bool lip_stable = std::isfinite(lip1.max_ratio) && std::isfinite(lip2.max_ratio) &&
                            refine_factor < 2.0 && refine_factor > 0.5;
    if (!lip_stable) ++failures;

    // Covering estimate from measurement images of sampled polygons.
    std::vector<Eigen::VectorXd> cloud;
    for (int i = 0; i < n_cover; ++i) {
        auto poly = sample_admissible_polygon(rng, nv, params);
        if (!poly) throw std::runtime_error("could not sample an admissible polygon");
        cloud.push_back(measurement_map(mesh1, *poly));
    }
    double diam = 0.0;
    for (size_t i = 0; i < cloud.size(); i += 7)
        for (size_t j = i + 1; j < cloud.size(); ++j)
            diam = std::max(diam, (cloud[i] - cloud[j]).norm());
    std::vector<double> eps_list;
    for (int k = 0; k < 16; ++k) eps_list.push_back(diam * std::pow(0.7, k));
    const CoveringReport cover = covering_estimate(cloud, eps_list);
    std::ostringstream cov_csv;
    cov_csv << "eps,count\n";
    for (size_t k = 0; k < cover.eps.size(); ++k)
        cov_csv << cover.eps[k] << "," << cover.counts[k] << "\n";
    write_text_file(out + "/covering.csv", cov_csv.str());
    const bool slope_ok = cover.fitted_slope <= 2.0 * nv + 0.5;
    if (!slope_ok) ++failures;

    std::ostringstream summary;
    summary << "bound sweeps: " << n_sweep << " cases each, failures " << failures << "\n";
    summary << "lipschitz max ratio: base " << lip1.max_ratio << ", refined " << lip2.max_ratio
            << " (factor " << refine_factor << ", skipped " << lip1.probes_skipped << "/"
            << lip2.probes_skipped << ")\n";
    summary << "covering slope: " << cover.fitted_slope << " (2 n_v = " << 2 * nv << ", fit on "
            << cover.fit_points << " points)\n";
    summary << (failures == 0 ? "ALL CHECKS PASS\n" : "CHECKS FAILED\n");
    write_text_file(out + "/summary.txt", summary.str());
    std::cout << summary.str();
    return failures == 0 ? 0 : kExitNumerical;
}

// --------------------------------------------------------------------- plot

int cmd_plot(const std::string& data_dir, const std::string& completed_dir,
             const std::string& recon_dir, const std::string& out, int count) {
    const LoadedDataset ds = load_dataset(data_dir, count);
    fs::create_directories(out);
    for (int i = 0; i < int(ds.records.size()); ++i) {
        const std::string tag = std::to_string(i);
        write_pgm(grid_to_matrix(ds.records[i].image), out + "/conductivity_" + tag + ".pgm");
        write_pgm(ds.records[i].dtn_normalized, out + "/dtn_normalized_" + tag + ".pgm");
        if (!completed_dir.empty()) {
            const std::string mp = completed_dir + "/mask_" + tag + ".bin";
            const std::string cp = completed_dir + "/completed_" + tag + ".bin";
            if (file_exists(mp)) write_pgm(load_mask(mp).m, out + "/mask_" + tag + ".pgm", 0.0, 1.0);
            if (file_exists(cp)) {
                const Eigen::MatrixXd completed = load_matrix(cp);
                write_pgm(completed, out + "/completed_" + tag + ".pgm");
                write_ppm_diverging(completed - ds.records[i].dtn_normalized,
                                    out + "/completion_error_" + tag + ".ppm");
            }
        }
        if (!recon_dir.empty()) {
            const std::string rp = recon_dir + "/recon_" + tag + ".bin";
            if (file_exists(rp)) {
                const Eigen::MatrixXd recon = load_matrix(rp);
                write_pgm(recon, out + "/recon_" + tag + ".pgm");
                write_ppm_diverging(recon - grid_to_matrix(ds.records[i].image),
                                    out + "/recon_error_" + tag + ".ppm");
            }
        }
    }
    std::printf("plots -> %s\n", out.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"EIT measurement completion toolkit"};
    app.require_subcommand(1);

    PipelineConfig cfg;
    std::string config_path;
    app.add_option("--config", config_path, "key = value config file");

    // Shared overrides (apply after the config file).
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--n-boundary", cfg.n_boundary);
        sub->add_option("--n-rings", cfg.n_rings);
        sub->add_option("--grid-size", cfg.grid_size);
        sub->add_option("--seed", cfg.seed);
        sub->add_option("--samples", cfg.samples);
        sub->add_option("--mask", cfg.mask_kind, "principal|random|hierarchical");
        sub->add_option("--rate", cfg.mask_rate);
        sub->add_option("--level", cfg.mask_level);
        sub->add_option("--s-offdiag", cfg.mask_s_offdiag);
        sub->add_option("--sigma-noise", cfg.sigma_noise);
    };

    std::string out, data_dir, ckpt_path, completed_dir, recon_dir, method = "full";
    std::vector<std::string> recon_specs;
    int limit = -1, nv = 3, n_sweep = 100, n_cover = 500, n_probes = 50;
    double step = 1e-3;

    auto* gen_mesh = app.add_subcommand("gen-mesh", "triangulate the unit disk");
    add_common(gen_mesh);
    gen_mesh->add_option("--out", out)->required();

    auto* gen_data = app.add_subcommand("gen-data", "sample phantoms and simulate measurements");
    add_common(gen_data);
    gen_data->add_option("--out", out)->required();

    auto* train_cmd = app.add_subcommand("train", "train the conditional denoiser");
    add_common(train_cmd);
    train_cmd->add_option("--data", data_dir)->required();
    train_cmd->add_option("--out", out)->required();
    train_cmd->add_option("--steps", cfg.steps);
    train_cmd->add_option("--rate-max", cfg.mask_rate_max);
    train_cmd->add_option("--lr", cfg.lr);
    train_cmd->add_option("--batch", cfg.batch);
    train_cmd->add_option("--T", cfg.T);
    train_cmd->add_option("--base-width", cfg.base_width);
    train_cmd->add_option("--clip-norm", cfg.clip_norm);

    auto* complete_cmd = app.add_subcommand("complete", "diffusion completion of masked measurements");
    add_common(complete_cmd);
    complete_cmd->add_option("--data", data_dir)->required();
    complete_cmd->add_option("--ckpt", ckpt_path)->required();
    complete_cmd->add_option("--out", out)->required();
    complete_cmd->add_option("--n-post", cfg.n_post);
    complete_cmd->add_option("--limit", limit, "complete only the first k samples");

    auto* baseline_cmd = app.add_subcommand("baseline-complete", "hierarchical nuclear-norm completion");
    add_common(baseline_cmd);
    baseline_cmd->add_option("--data", data_dir)->required();
    baseline_cmd->add_option("--out", out)->required();
    baseline_cmd->add_option("--limit", limit);

    auto* recon_cmd = app.add_subcommand("reconstruct", "linearized Tikhonov reconstruction");
    add_common(recon_cmd);
    recon_cmd->add_option("--data", data_dir)->required();
    recon_cmd->add_option("--out", out)->required();
    recon_cmd->add_option("--method", method, "full|zero-fill|diffusion|baseline");
    recon_cmd->add_option("--completed", completed_dir);
    recon_cmd->add_option("--lambda", cfg.lambda_reg);
    recon_cmd->add_option("--limit", limit);

    auto* eval_cmd = app.add_subcommand("evaluate", "aggregate per-method metrics");
    eval_cmd->add_option("--data", data_dir)->required();
    eval_cmd->add_option("--recon", recon_specs, "method=dir (repeatable)")->required();
    eval_cmd->add_option("--out", out)->required();

    auto* theory_cmd = app.add_subcommand("theory-check", "geometric/entropy bound sweeps");
    add_common(theory_cmd);
    theory_cmd->add_option("--out", out)->required();
    theory_cmd->add_option("--nv", nv);
    theory_cmd->add_option("--sweep-cases", n_sweep);
    theory_cmd->add_option("--cover-samples", n_cover);
    theory_cmd->add_option("--probes", n_probes);
    theory_cmd->add_option("--step", step);

    auto* plot_cmd = app.add_subcommand("plot", "emit PGM/PPM images");
    plot_cmd->add_option("--data", data_dir)->required();
    plot_cmd->add_option("--completed", completed_dir);
    plot_cmd->add_option("--recon", recon_dir);
    plot_cmd->add_option("--out", out)->required();
    plot_cmd->add_option("--count", limit);

    // Parse the config file first (if given) so flags override it.
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
    try {
        if (!config_path.empty()) {
            require_input(config_path, "a text editor");
            apply_config_file(cfg, config_path);
        }
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::system_error& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitMissing;
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen_mesh->parsed()) return cmd_gen_mesh(cfg, out);
        if (gen_data->parsed()) return cmd_gen_data(cfg, out);
        if (train_cmd->parsed()) return cmd_train(cfg, data_dir, out);
        if (complete_cmd->parsed()) return cmd_complete(cfg, data_dir, ckpt_path, out, limit);
        if (baseline_cmd->parsed()) return cmd_baseline_complete(cfg, data_dir, out, limit);
        if (recon_cmd->parsed())
            return cmd_reconstruct(cfg, data_dir, method, completed_dir, out, limit);
        if (eval_cmd->parsed()) return cmd_evaluate(data_dir, recon_specs, out);
        if (theory_cmd->parsed())
            return cmd_theory_check(cfg, out, nv, n_sweep, n_cover, n_probes, step);
        if (plot_cmd->parsed()) return cmd_plot(data_dir, completed_dir, recon_dir, out, limit);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::system_error& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitMissing;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kExitNumerical;
    }
    return 0;
}
