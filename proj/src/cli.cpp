#include "irbm/cli.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "irbm/checkpoint.hpp"
#include "irbm/data_io.hpp"
#include "irbm/evaluation.hpp"
#include "irbm/model.hpp"
#include "irbm/sampling.hpp"
#include "irbm/training.hpp"

#ifndef IRBM_VERSION
#define IRBM_VERSION "0.0.0"
#endif

namespace irbm {
namespace {

namespace fs = std::filesystem;

// Validation failures that map to exit code 2.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::string fmt(double x, int precision = 10) {
  if (std::isnan(x)) return "nan";
  std::ostringstream os;
  os << std::setprecision(precision) << x;
  return os.str();
}

std::string hex64(std::uint64_t x) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << x;
  return os.str();
}

void require_checkpoint(const fs::path& dir) {
  if (!fs::is_directory(dir) || !fs::exists(dir / "meta.json"))
    throw UsageError("checkpoint not found: " + dir.string());
}

void require_file(const fs::path& path, const std::string& what) {
  if (!fs::is_regular_file(path)) throw UsageError(what + " not found: " + path.string());
}

RegKind parse_reg(const std::string& s) {
  if (s == "none") return RegKind::None;
  if (s == "l1") return RegKind::L1;
  if (s == "l2") return RegKind::L2;
  throw UsageError("unknown regularization '" + s + "'");
}

double exact_log_partition(const ModelParams& params) {
  if (params.variant == Variant::Rbm && params.hidden() < params.visible())
    return rbm_log_partition_by_hidden(params);
  return exact_log_partition_small(params);
}

bool enumerable(const ModelParams& params) {
  if (params.visible() <= kEnumerationBudget) return true;
  return params.variant == Variant::Rbm && params.hidden() <= kEnumerationBudget;
}

std::vector<std::pair<std::size_t, std::size_t>> parse_intervals(const std::string& text) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw UsageError("interval '" + item + "' is not of the form a:b");
    try {
      std::size_t used_a = 0, used_b = 0;
      const std::string as = item.substr(0, colon), bs = item.substr(colon + 1);
      const auto a = std::stoull(as, &used_a);
      const auto b = std::stoull(bs, &used_b);
      if (used_a != as.size() || used_b != bs.size()) throw std::invalid_argument("trailing characters");
      if (a >= b) throw UsageError("interval '" + item + "' is empty");
      out.emplace_back(a, b);
    } catch (const UsageError&) {
      throw;
    } catch (const std::exception&) {
      throw UsageError("interval '" + item + "' is not of the form a:b");
    }
  }
  if (out.empty()) throw UsageError("no intervals given");
  return out;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string model;
  std::string data;
  std::size_t hidden = 0;
  double beta = kDefaultBeta;
  double lr = 0.05;
  std::string reg = "none";
  double lambda = 0.0;
  std::size_t batch = 64;
  std::size_t cd_steps = 10;
  std::string method = "pcd";
  std::string positive = "expected";
  std::size_t epochs = 5000;
  std::uint64_t seed = 1234;
  std::uint64_t binarize_seed = 0;
  double init_scale = kDefaultInitScale;
  std::size_t max_hidden = 0;
  std::size_t save_every = 1000;
  std::size_t log_every = 100;
  std::string resume;
  std::string out;
};

void write_manifest(const fs::path& path, const TrainArgs& a, const TrainConfig& cfg, std::size_t hidden,
                    const Dataset& data) {
  std::ofstream m(path, std::ios::trunc);
  if (!m) throw std::runtime_error("cannot write " + path.string());
  m << std::setprecision(17);
  m << "version=" << IRBM_VERSION << '\n'
    << "command=train\n"
    << "model=" << a.model << '\n'
    << "data=" << a.data << '\n'
    << "data_rows=" << data.size() << '\n'
    << "data_dim=" << data.dim() << '\n'
    << "data_hash=" << hex64(dataset_hash(data)) << '\n'
    << "binarize_seed=" << a.binarize_seed << '\n'
    << "hidden=" << hidden << '\n'
    << "beta=" << a.beta << '\n'
    << "init_scale=" << a.init_scale << '\n'
    << "lr=" << cfg.lr << '\n'
    << "adagrad_eps=" << cfg.adagrad_eps << '\n'
    << "reg=" << a.reg << '\n'
    << "lambda=" << cfg.lambda << '\n'
    << "batch=" << cfg.batch_size << '\n'
    << "cd_steps=" << cfg.gibbs_steps << '\n'
    << "method=" << a.method << '\n'
    << "positive=" << a.positive << '\n'
    << "epochs=" << a.epochs << '\n'
    << "seed=" << cfg.seed << '\n'
    << "max_hidden=" << cfg.hidden_cap(data.dim()) << '\n'
    << "resume=" << a.resume << '\n';
}

int cmd_train(const TrainArgs& a, std::ostream& out) {
  require_file(a.data, "dataset");
  const Variant variant = parse_variant(a.model);
  TrainConfig cfg;
  cfg.lr = a.lr;
  cfg.reg = parse_reg(a.reg);
  cfg.lambda = a.lambda;
  cfg.batch_size = a.batch;
  cfg.gibbs_steps = a.cd_steps;
  cfg.method = a.method == "cd" ? NegativePhase::Cd : NegativePhase::Pcd;
  cfg.positive = a.positive == "sampled" ? PositivePhase::SampledZ : PositivePhase::Expected;
  cfg.seed = a.seed;
  cfg.max_hidden_cap = a.max_hidden;
  cfg.validate();

  const Dataset data = load_dataset(a.data, a.binarize_seed);
  if (data.size() == 0) throw UsageError("dataset is empty");
  const std::size_t hidden = a.hidden ? a.hidden : (variant == Variant::Irbm ? 1 : 500);

  TrainerState state = [&] {
    if (!a.resume.empty()) {
      require_checkpoint(a.resume);
      TrainerState s = read_checkpoint(a.resume);
      if (s.params.variant != variant) throw UsageError("--resume checkpoint holds a different model");
      return s;
    }
    return make_trainer(init_model(variant, data.dim(), hidden, a.beta, a.init_scale, a.seed), cfg);
  }();
  if (state.params.visible() != data.dim()) throw UsageError("dataset dimension does not match model");
  if (state.epoch > a.epochs) throw UsageError("checkpoint is already past --epochs");
  cfg.epochs = a.epochs - state.epoch;

  const fs::path dir(a.out);
  fs::create_directories(dir);
  write_manifest(dir / "manifest.txt", a, cfg, hidden, data);

  train(state, data, cfg, [&](const TrainerState& s, const EpochRecord& rec) {
    if (a.log_every && rec.epoch % a.log_every == 0)
      out << "epoch " << rec.epoch << " K=" << rec.hidden << " mean_free_energy=" << fmt(rec.mean_free_energy)
          << '\n';
    if (a.save_every && rec.epoch % a.save_every == 0)
      write_checkpoint(dir / ("epoch_" + std::to_string(rec.epoch)), s);
  });
  write_checkpoint(dir / "checkpoint", state);
  write_history_csv(dir / "history.csv", state.history);

  double fsum = 0.0;
  for (std::size_t n = 0; n < data.size(); ++n) fsum += free_energy(state.params, data.row(n));
  out << "final " << (variant == Variant::Irbm ? "l=" : "K=") << state.params.hidden()
      << " mean_free_energy=" << fmt(fsum / static_cast<double>(data.size())) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string checkpoint;
  std::string data;
  bool exact = false;
  std::size_t ais_inter = 100000;
  std::size_t ais_chains = 5000;
  std::uint64_t ais_seed = 0;
  std::string ais_base = "target";
  std::size_t threads = 1;
  std::uint64_t binarize_seed = 0;
  std::string name;
  std::string csv;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  require_checkpoint(a.checkpoint);
  if (!a.data.empty()) require_file(a.data, "dataset");
  const ModelParams params = read_checkpoint_model(a.checkpoint);
  std::optional<Dataset> data;
  if (!a.data.empty()) {
    data = load_dataset(a.data, a.binarize_seed);
    if (data->dim() != params.visible()) throw UsageError("dataset dimension does not match model");
  }

  double ln_z = 0.0, lo = 0.0, hi = 0.0;
  if (a.exact) {
    if (!enumerable(params)) throw UsageError("--exact: model too large to enumerate");
    ln_z = lo = hi = exact_log_partition(params);
  } else {
    AisConfig cfg;
    cfg.num_intermediate = a.ais_inter;
    cfg.num_chains = a.ais_chains;
    cfg.seed = a.ais_seed;
    cfg.threads = a.threads;
    if (a.ais_base == "zero") {
      cfg.base = AisBase::ZeroVisible;
    } else if (a.ais_base == "data") {
      if (!data) throw UsageError("--ais-base data needs --data");
      cfg.base = AisBase::DataMarginals;
      cfg.base_visible_bias = data_marginal_visible_bias(*data);
    }
    cfg.validate();
    const AisResult r = ais_log_partition(params, cfg);
    ln_z = r.ln_z_hat;
    lo = r.ln_z_lo3sigma;
    hi = r.ln_z_hi3sigma;
  }

  std::string nll, ci;
  if (data) {
    const NllEstimate e = estimate_nll(params, *data, ln_z);
    nll = fmt(e.mean);
    ci = fmt(e.ci95);
  }
  const std::string name = a.name.empty() ? std::string(to_string(params.variant)) : a.name;
  const std::vector<std::string> header{"model", "size", "lnZ", "lnZ_lo", "lnZ_hi", "nll", "ci"};
  const std::vector<std::string> row{name, std::to_string(params.hidden()), fmt(ln_z), fmt(lo), fmt(hi), nll, ci};
  for (std::size_t i = 0; i < header.size(); ++i) out << std::left << std::setw(i == 0 ? 10 : 16) << header[i];
  out << '\n';
  for (std::size_t i = 0; i < row.size(); ++i) out << std::left << std::setw(i == 0 ? 10 : 16) << row[i];
  out << '\n';

  if (!a.csv.empty()) {
    std::ofstream csv(a.csv, std::ios::trunc);
    if (!csv) throw std::runtime_error("cannot write " + a.csv);
    for (std::size_t i = 0; i < header.size(); ++i) csv << (i ? "," : "") << header[i];
    csv << '\n';
    for (std::size_t i = 0; i < row.size(); ++i) csv << (i ? "," : "") << row[i];
    csv << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------- sample

struct SampleArgs {
  std::string checkpoint;
  std::string out;
  std::size_t steps = 10000;
  std::string init = "random";
  std::size_t count = 16;
  std::size_t grid_cols = 4;
  std::size_t width = 0;
  std::uint64_t seed = 0;
};

int cmd_sample(const SampleArgs& a, std::ostream& out) {
  require_checkpoint(a.checkpoint);
  const ModelParams params = read_checkpoint_model(a.checkpoint);
  const bool zk = a.init == "zK";
  if (zk && !is_ordered(params.variant)) throw UsageError("--init zK needs an ordered model");
  const std::size_t d = params.visible();
  std::size_t w = a.width;
  if (w == 0) {
    w = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(d))));
    if (w * w != d) w = d;
  }
  if (d % w != 0) throw UsageError("--width must divide the number of visible units");
  const std::size_t h = d / w;
  const std::size_t cols = std::min(a.grid_cols, a.count);
  const std::size_t rows = (a.count + cols - 1) / cols;

  std::vector<BinaryVector> samples;
  for (std::size_t c = 0; c < a.count; ++c) {
    RngStream rng(a.seed, c);
    ChainState s = init_chain(params, zk ? ChainInit::ZEqualsK : ChainInit::RandomUniform, rng);
    s = run_chain(params, std::move(s), a.steps, rng);
    samples.push_back(std::move(s.v));
  }

  const std::size_t img_w = cols * w, img_h = rows * h;
  std::vector<std::uint8_t> pixels(img_w * img_h, 0);
  for (std::size_t c = 0; c < samples.size(); ++c) {
    const std::size_t gx = (c % cols) * w, gy = (c / cols) * h;
    for (std::size_t j = 0; j < d; ++j) pixels[(gy + j / w) * img_w + gx + j % w] = samples[c][j] ? 255 : 0;
  }
  std::ofstream pgm(a.out, std::ios::binary | std::ios::trunc);
  if (!pgm) throw std::runtime_error("cannot write " + a.out);
  pgm << "P5\n" << img_w << ' ' << img_h << "\n255\n";
  pgm.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
  out << "wrote " << a.count << " samples to " << a.out << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- inspect-z

struct InspectArgs {
  std::string checkpoint;
  std::string data;
  std::string out;
  std::string intervals;
  std::size_t top_k = 10;
  std::size_t limit = 0;
  std::uint64_t binarize_seed = 0;
};

int cmd_inspect_z(const InspectArgs& a, std::ostream& out) {
  require_checkpoint(a.checkpoint);
  require_file(a.data, "dataset");
  const ModelParams params = read_checkpoint_model(a.checkpoint);
  if (!is_ordered(params.variant)) throw UsageError("inspect-z needs an ordered model");
  const auto intervals = parse_intervals(a.intervals);
  Dataset data = load_dataset(a.data, a.binarize_seed);
  if (data.dim() != params.visible()) throw UsageError("dataset dimension does not match model");
  if (a.limit && a.limit < data.size()) data = data.slice(0, a.limit);

  const ZInspection insp = inspect_z(params, data, intervals, a.top_k);
  const fs::path dir(a.out);
  fs::create_directories(dir);
  fs::create_directories(dir / "p_z");
  for (std::size_t n = 0; n < insp.distributions.size(); ++n) {
    const ZDistribution& dist = insp.distributions[n];
    const fs::path path = dir / "p_z" / ("example_" + std::to_string(n) + ".csv");
    std::ofstream pz(path, std::ios::trunc);
    if (!pz) throw std::runtime_error("cannot write " + path.string());
    pz << "z,prob\n" << std::setprecision(17);
    for (std::size_t z = 1; z <= dist.probs.size(); ++z) pz << z << ',' << dist.probs[z - 1] << '\n';
    if (dist.has_tail) pz << "tail," << dist.tail_mass << '\n';
  }
  for (const auto& r : insp.rankings) {
    const fs::path path = dir / ("top_" + std::to_string(r.a) + "_" + std::to_string(r.b) + ".csv");
    std::ofstream t(path, std::ios::trunc);
    if (!t) throw std::runtime_error("cannot write " + path.string());
    t << "rank,example,prob\n" << std::setprecision(17);
    for (std::size_t i = 0; i < r.top.size(); ++i) t << i + 1 << ',' << r.top[i].first << ',' << r.top[i].second << '\n';
    out << "interval [" << r.a << ", " << r.b << "): top example " << (r.top.empty() ? std::string("-") : std::to_string(r.top[0].first))
        << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------- gradcheck

struct GradcheckArgs {
  std::string checkpoint;
  std::string model = "irbm";
  std::size_t visible = 8;
  std::size_t hidden = 4;
  double beta = kDefaultBeta;
  double scale = 1.0;
  std::size_t samples = 10;
  std::uint64_t seed = 0;
  double rel_tol = 1e-6;
  double abs_tol = 1e-8;
};

int cmd_gradcheck(const GradcheckArgs& a, std::ostream& out) {
  ModelParams params;
  if (!a.checkpoint.empty()) {
    require_checkpoint(a.checkpoint);
    params = read_checkpoint_model(a.checkpoint);
  } else {
    params = init_model(parse_variant(a.model), a.visible, a.hidden, a.beta, 0.0, a.seed);
    RngStream rng(a.seed, 1);
    if (params.hidden() == 0) params = grow_hidden_unit(std::move(params));
    for (double& w : params.W.values()) w = rng.uniform(-a.scale, a.scale);
    for (double& b : params.bv) b = rng.uniform(-a.scale, a.scale);
    for (double& b : params.bh) b = rng.uniform(-a.scale, a.scale);
  }
  RngStream rng(a.seed, 2);
  std::array<GradcheckBlock, 3> worst;
  worst[0].name = "W";
  worst[1].name = "bv";
  worst[2].name = "bh";
  BinaryVector v(params.visible());
  for (std::size_t s = 0; s < a.samples; ++s) {
    for (auto& x : v) x = rng.uniform() < 0.5 ? 1 : 0;
    const GradcheckReport r = gradcheck(params, v, a.rel_tol, a.abs_tol);
    for (std::size_t b = 0; b < 3; ++b) {
      worst[b].max_abs_error = std::max(worst[b].max_abs_error, r.blocks[b].max_abs_error);
      worst[b].max_rel_error = std::max(worst[b].max_rel_error, r.blocks[b].max_rel_error);
      worst[b].max_scaled_error = std::max(worst[b].max_scaled_error, r.blocks[b].max_scaled_error);
      worst[b].pass = worst[b].pass && r.blocks[b].pass;
    }
  }
  bool all = true;
  for (const auto& b : worst) {
    out << std::left << std::setw(3) << b.name << ' ' << (b.pass ? "PASS" : "FAIL") << " max_abs=" << fmt(b.max_abs_error, 3)
        << " max_rel=" << fmt(b.max_rel_error, 3) << '\n';
    all = all && b.pass;
  }
  return all ? kExitOk : kExitRuntime;
}

// ---------------------------------------------------------------- data

struct SynthArgs {
  std::size_t dim = 16;
  std::size_t patterns = 4;
  double noise = 0.05;
  std::size_t n = 2000;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::string out;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  const Dataset d = synthetic_patterns(a.dim, a.patterns, a.noise, a.n, a.seed, a.stream);
  write_packed_dataset(a.out, d);
  out << "wrote " << d.size() << "x" << d.dim() << " hash=" << hex64(dataset_hash(d)) << '\n';
  return kExitOk;
}

struct BinarizeArgs {
  std::string idx;
  std::uint64_t seed = 0;
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string out;
};

int cmd_binarize(const BinarizeArgs& a, std::ostream& out) {
  require_file(a.idx, "idx file");
  Dataset d = load_dataset(a.idx, a.seed);
  const std::size_t end = a.end ? a.end : d.size();
  if (a.begin > end || end > d.size()) throw UsageError("row range outside the dataset");
  d = d.slice(a.begin, end);
  write_packed_dataset(a.out, d);
  out << "wrote " << d.size() << "x" << d.dim() << " hash=" << hex64(dataset_hash(d)) << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Restricted Boltzmann machines with ordered and growing hidden layers", "irbm"};
  app.require_subcommand(1);
  app.set_version_flag("--version", IRBM_VERSION);

  TrainArgs ta;
  auto* train_cmd = app.add_subcommand("train", "Train a model and write checkpoints");
  train_cmd->add_option("--model", ta.model, "rbm, orbm or irbm")->required()->check(CLI::IsMember({"rbm", "orbm", "irbm"}));
  train_cmd->add_option("--data", ta.data, "Packed-bit or IDX dataset")->required();
  train_cmd->add_option("--hidden", ta.hidden, "Hidden units (initial l for irbm); default 500, irbm 1");
  train_cmd->add_option("--beta", ta.beta, "Penalty scale, must exceed 1")->capture_default_str();
  train_cmd->add_option("--lr", ta.lr, "ADAGRAD learning rate")->capture_default_str();
  train_cmd->add_option("--reg", ta.reg, "none, l1 or l2")->capture_default_str()->check(CLI::IsMember({"none", "l1", "l2"}));
  train_cmd->add_option("--lambda", ta.lambda, "Regularization factor")->capture_default_str();
  train_cmd->add_option("--batch", ta.batch, "Minibatch size")->capture_default_str();
  train_cmd->add_option("--cd-steps", ta.cd_steps, "Gibbs steps per update")->capture_default_str();
  train_cmd->add_option("--method", ta.method, "cd or pcd")->capture_default_str()->check(CLI::IsMember({"cd", "pcd"}));
  train_cmd->add_option("--positive", ta.positive, "expected or sampled z in the positive phase")
      ->capture_default_str()
      ->check(CLI::IsMember({"expected", "sampled"}));
  train_cmd->add_option("--epochs", ta.epochs, "Total epochs")->capture_default_str();
  train_cmd->add_option("--seed", ta.seed, "Training seed")->capture_default_str();
  train_cmd->add_option("--binarize-seed", ta.binarize_seed, "Seed for binarizing IDX input")->capture_default_str();
  train_cmd->add_option("--init-scale", ta.init_scale, "Initial weights ~ U[-s, s]")->capture_default_str();
  train_cmd->add_option("--max-hidden", ta.max_hidden, "irbm size cap; 0 means 10 * D")->capture_default_str();
  train_cmd->add_option("--save-every", ta.save_every, "Checkpoint period in epochs; 0 disables")->capture_default_str();
  train_cmd->add_option("--log-every", ta.log_every, "Progress period in epochs; 0 disables")->capture_default_str();
  train_cmd->add_option("--resume", ta.resume, "Continue from a checkpoint directory");
  train_cmd->add_option("--out", ta.out, "Output directory")->required();

  EvalArgs ea;
  auto* eval_cmd = app.add_subcommand("eval", "Estimate ln Z and the average NLL");
  eval_cmd->add_option("--checkpoint", ea.checkpoint, "Checkpoint directory")->required();
  eval_cmd->add_option("--data", ea.data, "Dataset for the NLL columns");
  eval_cmd->add_flag("--exact", ea.exact, "Enumerate instead of AIS");
  eval_cmd->add_option("--ais-inter", ea.ais_inter, "AIS intermediate distributions")->capture_default_str();
  eval_cmd->add_option("--ais-chains", ea.ais_chains, "AIS chains")->capture_default_str();
  eval_cmd->add_option("--ais-seed", ea.ais_seed, "AIS seed")->capture_default_str();
  eval_cmd->add_option("--ais-base", ea.ais_base, "target, zero or data")
      ->capture_default_str()
      ->check(CLI::IsMember({"target", "zero", "data"}));
  eval_cmd->add_option("--threads", ea.threads, "AIS worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  eval_cmd->add_option("--binarize-seed", ea.binarize_seed, "Seed for binarizing IDX input")->capture_default_str();
  eval_cmd->add_option("--name", ea.name, "Label for the model column");
  eval_cmd->add_option("--csv", ea.csv, "Also write the row as CSV");

  SampleArgs sa;
  auto* sample_cmd = app.add_subcommand("sample", "Write a PGM grid of Gibbs samples");
  sample_cmd->add_option("--checkpoint", sa.checkpoint, "Checkpoint directory")->required();
  sample_cmd->add_option("--out", sa.out, "Output PGM")->required();
  sample_cmd->add_option("--steps", sa.steps, "Gibbs steps per chain")->capture_default_str();
  sample_cmd->add_option("--init", sa.init, "random or zK")->capture_default_str()->check(CLI::IsMember({"random", "zK"}));
  sample_cmd->add_option("--count", sa.count, "Number of samples")->capture_default_str()->check(CLI::PositiveNumber);
  sample_cmd->add_option("--grid-cols", sa.grid_cols, "Samples per grid row")->capture_default_str()->check(CLI::PositiveNumber);
  sample_cmd->add_option("--width", sa.width, "Image width; default sqrt(D) when square");
  sample_cmd->add_option("--seed", sa.seed, "Sampling seed")->capture_default_str();

  InspectArgs ia;
  auto* inspect_cmd = app.add_subcommand("inspect-z", "Write P(z|v) and top examples per interval");
  inspect_cmd->add_option("--checkpoint", ia.checkpoint, "Checkpoint directory")->required();
  inspect_cmd->add_option("--data", ia.data, "Examples to inspect")->required();
  inspect_cmd->add_option("--out", ia.out, "Output directory")->required();
  inspect_cmd->add_option("--intervals", ia.intervals, "Comma-separated a:b ranges of z")->required();
  inspect_cmd->add_option("--top-k", ia.top_k, "Examples per interval")->capture_default_str();
  inspect_cmd->add_option("--limit", ia.limit, "Inspect only the first N examples");
  inspect_cmd->add_option("--binarize-seed", ia.binarize_seed, "Seed for binarizing IDX input")->capture_default_str();

  GradcheckArgs ga;
  auto* grad_cmd = app.add_subcommand("gradcheck", "Compare analytic gradients with finite differences");
  grad_cmd->add_option("--checkpoint", ga.checkpoint, "Checkpoint directory; default is a fresh random model");
  grad_cmd->add_option("--model", ga.model, "Variant of the random model")
      ->capture_default_str()
      ->check(CLI::IsMember({"rbm", "orbm", "irbm"}));
  grad_cmd->add_option("--visible", ga.visible, "Visible units of the random model")->capture_default_str();
  grad_cmd->add_option("--hidden", ga.hidden, "Hidden units of the random model")->capture_default_str();
  grad_cmd->add_option("--beta", ga.beta, "Penalty scale of the random model")->capture_default_str();
  grad_cmd->add_option("--scale", ga.scale, "Random parameters ~ U[-s, s]")->capture_default_str();
  grad_cmd->add_option("--samples", ga.samples, "Random visible vectors")->capture_default_str();
  grad_cmd->add_option("--seed", ga.seed, "Seed")->capture_default_str();
  grad_cmd->add_option("--rel-tol", ga.rel_tol, "Relative tolerance")->capture_default_str();
  grad_cmd->add_option("--abs-tol", ga.abs_tol, "Absolute floor")->capture_default_str();

  auto* data_cmd = app.add_subcommand("data", "Dataset utilities");
  data_cmd->require_subcommand(1);
  SynthArgs sy;
  auto* synth_cmd = data_cmd->add_subcommand("synth", "Generate a noisy-prototype dataset");
  synth_cmd->add_option("--dim", sy.dim, "Visible units")->capture_default_str();
  synth_cmd->add_option("--patterns", sy.patterns, "Number of prototypes")->capture_default_str();
  synth_cmd->add_option("--noise", sy.noise, "Bit-flip probability")->capture_default_str();
  synth_cmd->add_option("--n", sy.n, "Examples")->capture_default_str();
  synth_cmd->add_option("--seed", sy.seed, "Prototype seed")->capture_default_str();
  synth_cmd->add_option("--stream", sy.stream, "Example stream (use distinct streams for splits)")->capture_default_str();
  synth_cmd->add_option("--out", sy.out, "Output packed-bit file")->required();
  BinarizeArgs ba;
  auto* bin_cmd = data_cmd->add_subcommand("binarize", "Binarize an IDX image file into packed bits");
  bin_cmd->add_option("--idx", ba.idx, "IDX image file")->required();
  bin_cmd->add_option("--seed", ba.seed, "Binarization seed")->capture_default_str();
  bin_cmd->add_option("--begin", ba.begin, "First row")->capture_default_str();
  bin_cmd->add_option("--end", ba.end, "One past the last row; 0 means all");
  bin_cmd->add_option("--out", ba.out, "Output packed-bit file")->required();

  std::vector<const char*> argv{"irbm"};
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    CLI::App* target = &app;
    while (!target->get_subcommands().empty()) target = target->get_subcommands().front();
    out << target->help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << IRBM_VERSION << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    CLI::App* target = &app;
    while (!target->get_subcommands().empty()) target = target->get_subcommands().front();
    err << "error: " << e.what() << "\n\n" << target->help();
    return kExitUsage;
  }

  try {
    if (train_cmd->parsed()) return cmd_train(ta, out);
    if (eval_cmd->parsed()) return cmd_eval(ea, out);
    if (sample_cmd->parsed()) return cmd_sample(sa, out);
    if (inspect_cmd->parsed()) return cmd_inspect_z(ia, out);
    if (grad_cmd->parsed()) return cmd_gradcheck(ga, out);
    if (synth_cmd->parsed()) return cmd_synth(sy, out);
    if (bin_cmd->parsed()) return cmd_binarize(ba, out);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace irbm
