#include "irbm/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "irbm/data_io.hpp"

namespace irbm {
namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint format assumes a little-endian host");

using nlohmann::json;

void write_doubles(const std::filesystem::path& path, std::span<const double> xs) {
  std::vector<std::uint8_t> bytes(xs.size() * sizeof(double));
  if (!xs.empty()) std::memcpy(bytes.data(), xs.data(), bytes.size());
  write_file_bytes(path, bytes);
}

RealVector read_doubles(const std::filesystem::path& path, std::size_t expected) {
  const auto bytes = read_file_bytes(path);
  if (bytes.size() != expected * sizeof(double))
    throw std::runtime_error("checkpoint: " + path.filename().string() + " holds " + std::to_string(bytes.size()) +
                             " bytes, expected " + std::to_string(expected * sizeof(double)));
  RealVector out(expected);
  if (expected) std::memcpy(out.data(), bytes.data(), bytes.size());
  return out;
}

RealMatrix read_matrix(const std::filesystem::path& path, std::size_t rows, std::size_t cols) {
  RealMatrix m(rows, cols);
  m.values() = read_doubles(path, rows * cols);
  return m;
}

json rng_to_json(const RngStream& rng) {
  const auto s = rng.state();
  return {{"seed", rng.seed()}, {"stream", rng.stream()}, {"state", {s[0], s[1], s[2], s[3]}}};
}

RngStream rng_from_json(const json& j) {
  RngStream rng(j.at("seed").get<std::uint64_t>(), j.at("stream").get<std::uint64_t>());
  std::array<std::uint64_t, 4> s{};
  for (std::size_t i = 0; i < 4; ++i) s[i] = j.at("state").at(i).get<std::uint64_t>();
  rng.set_state(s);
  return rng;
}

json read_meta(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw std::runtime_error("checkpoint not found: " + dir.string());
  std::ifstream in(dir / "meta.json");
  if (!in) throw std::runtime_error("checkpoint: missing meta.json in " + dir.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("checkpoint: malformed meta.json: ") + e.what());
  }
}

ModelParams model_from(const std::filesystem::path& dir, const json& meta) {
  ModelParams p;
  try {
    p.variant = parse_variant(meta.at("variant").get<std::string>());
    p.beta = meta.at("beta").get<double>();
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("checkpoint: bad meta.json: ") + e.what());
  }
  const auto d = meta.at("D").get<std::size_t>();
  const auto k = meta.at("K").get<std::size_t>();
  p.W = read_matrix(dir / "W.f64", k, d);
  p.bv = read_doubles(dir / "bv.f64", d);
  p.bh = read_doubles(dir / "bh.f64", k);
  try {
    validate(p);
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("checkpoint: ") + e.what());
  }
  return p;
}

}  // namespace

void write_history_csv(const std::filesystem::path& path, const std::vector<EpochRecord>& history) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "epoch,mean_free_energy,K,wall_seconds\n" << std::setprecision(17);
  for (const auto& r : history) out << r.epoch << ',' << r.mean_free_energy << ',' << r.hidden << ',' << r.wall_seconds << '\n';
}

void write_checkpoint(const std::filesystem::path& dir, const TrainerState& state) {
  std::filesystem::create_directories(dir);
  const ModelParams& p = state.params;
  json meta = {{"variant", std::string(to_string(p.variant))},
               {"D", p.visible()},
               {"K", p.hidden()},
               {"beta", p.beta},
               {"seed", state.shuffle_rng.seed()},
               {"epoch", state.epoch},
               {"shuffle_rng", rng_to_json(state.shuffle_rng)},
               {"sample_rng", rng_to_json(state.sample_rng)},
               {"pcd_chains", state.pcd.chains.size()}};
  std::ofstream(dir / "meta.json", std::ios::trunc) << meta.dump(2) << '\n';

  write_doubles(dir / "W.f64", p.W.values());
  write_doubles(dir / "bv.f64", p.bv);
  write_doubles(dir / "bh.f64", p.bh);
  write_doubles(dir / "adagrad_W.f64", state.adagrad.W.values());
  write_doubles(dir / "adagrad_bv.f64", state.adagrad.bv);
  write_doubles(dir / "adagrad_bh.f64", state.adagrad.bh);

  std::vector<std::uint8_t> pcd_v;
  std::vector<std::uint8_t> pcd_z;
  for (const auto& c : state.pcd.chains) {
    if (c.v.size() != p.visible()) throw std::invalid_argument("checkpoint: chain length does not match model");
    pcd_v.insert(pcd_v.end(), c.v.begin(), c.v.end());
    const auto z = static_cast<std::int64_t>(c.z);
    for (int b = 0; b < 64; b += 8) pcd_z.push_back(static_cast<std::uint8_t>(static_cast<std::uint64_t>(z) >> b));
  }
  write_file_bytes(dir / "pcd_v.u8", pcd_v);
  write_file_bytes(dir / "pcd_z.i64", pcd_z);
  write_history_csv(dir / "history.csv", state.history);
}

ModelParams read_checkpoint_model(const std::filesystem::path& dir) { return model_from(dir, read_meta(dir)); }

TrainerState read_checkpoint(const std::filesystem::path& dir) {
  const json meta = read_meta(dir);
  TrainerState state{model_from(dir, meta), {}, {}, rng_from_json(meta.at("shuffle_rng")),
                     rng_from_json(meta.at("sample_rng")), meta.at("epoch").get<std::size_t>(), {}};
  const std::size_t d = state.params.visible();
  const std::size_t k = state.params.hidden();
  state.adagrad.W = read_matrix(dir / "adagrad_W.f64", k, d);
  state.adagrad.bv = read_doubles(dir / "adagrad_bv.f64", d);
  state.adagrad.bh = read_doubles(dir / "adagrad_bh.f64", k);

  const auto chains = meta.at("pcd_chains").get<std::size_t>();
  const auto pcd_v = read_file_bytes(dir / "pcd_v.u8");
  const auto pcd_z = read_file_bytes(dir / "pcd_z.i64");
  if (pcd_v.size() != chains * d || pcd_z.size() != chains * 8)
    throw std::runtime_error("checkpoint: persistent chain files do not match meta.json");
  for (std::size_t i = 0; i < chains; ++i) {
    ChainState c;
    c.v.assign(pcd_v.begin() + i * d, pcd_v.begin() + (i + 1) * d);
    std::uint64_t z = 0;
    for (int b = 0; b < 8; ++b) z |= std::uint64_t{pcd_z[i * 8 + b]} << (8 * b);
    if (static_cast<std::int64_t>(z) < 0) throw std::runtime_error("checkpoint: negative chain z");
    c.z = z;
    state.pcd.chains.push_back(std::move(c));
  }

  std::ifstream hist(dir / "history.csv");
  std::string line;
  if (hist && std::getline(hist, line)) {
    while (std::getline(hist, line)) {
      if (line.empty()) continue;
      std::istringstream ls(line);
      EpochRecord rec;
      char comma;
      ls >> rec.epoch >> comma >> rec.mean_free_energy >> comma >> rec.hidden >> comma >> rec.wall_seconds;
      if (!ls) throw std::runtime_error("checkpoint: malformed history.csv line: " + line);
      state.history.push_back(rec);
    }
  }
  return state;
}

}  // namespace irbm
