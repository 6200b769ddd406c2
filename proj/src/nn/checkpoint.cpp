#include "ifsynth/nn/checkpoint.h"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace ifsynth::nn {

namespace {

constexpr char kMagic[8] = {'I', 'F', 'S', 'Y', 'N', 'C', 'K', '1'};

void write_raw(std::ofstream& out, const Tensor& t) {
  out.write((const char*)t.ptr(), (std::streamsize)(t.numel() * (i64)sizeof(double)));
}

void read_raw(std::ifstream& in, Tensor& t) {
  in.read((char*)t.ptr(), (std::streamsize)(t.numel() * (i64)sizeof(double)));
  if (!in) throw std::runtime_error("checkpoint: truncated payload");
}

nlohmann::json read_header(std::ifstream& in, const std::filesystem::path& path) {
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0)
    throw std::runtime_error("checkpoint: bad magic in " + path.string());
  uint64_t hlen = 0;
  in.read((char*)&hlen, 8);
  std::string hdr((size_t)hlen, '\0');
  in.read(hdr.data(), (std::streamsize)hlen);
  if (!in) throw std::runtime_error("checkpoint: truncated header in " + path.string());
  return nlohmann::json::parse(hdr);
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path,
                     std::span<const ParamStore* const> stores,
                     std::span<const Adam* const> opts, const nlohmann::json& meta) {
  nlohmann::json dir;
  dir["version"] = 1;
  dir["meta"] = meta;
  dir["stores"] = nlohmann::json::array();
  for (const ParamStore* ps : stores) {
    nlohmann::json js = nlohmann::json::array();
    for (size_t i = 0; i < ps->size(); ++i) {
      const Parameter& p = ps->at(i);
      js.push_back({{"name", p.name}, {"shape", p.value.shape}});
    }
    dir["stores"].push_back({{"params", js}});
  }
  dir["adams"] = nlohmann::json::array();
  for (const Adam* opt : opts) {
    if (opt && !opt->m().empty())
      dir["adams"].push_back({{"present", true}, {"t", opt->t()}});
    else
      dir["adams"].push_back({{"present", false}});
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("checkpoint: cannot open " + path.string());
  const std::string hdr = dir.dump();
  out.write(kMagic, 8);
  const uint64_t hlen = hdr.size();
  out.write((const char*)&hlen, 8);
  out.write(hdr.data(), (std::streamsize)hdr.size());
  for (const ParamStore* ps : stores)
    for (size_t i = 0; i < ps->size(); ++i) write_raw(out, ps->at(i).value);
  for (size_t oi = 0; oi < opts.size(); ++oi) {
    const Adam* opt = opts[oi];
    if (!opt || opt->m().empty()) continue;
    for (const Tensor& t : opt->m()) write_raw(out, t);
    for (const Tensor& t : opt->v()) write_raw(out, t);
  }
  if (!out) throw std::runtime_error("checkpoint: short write to " + path.string());
}

nlohmann::json load_checkpoint(const std::filesystem::path& path,
                               std::span<ParamStore* const> stores,
                               std::span<Adam* const> opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path.string());
  nlohmann::json dir = read_header(in, path);

  const auto& jstores = dir.at("stores");
  if (jstores.size() != stores.size())
    throw std::runtime_error("checkpoint: store count mismatch");
  for (size_t si = 0; si < stores.size(); ++si) {
    ParamStore& ps = *stores[si];
    const auto& jp = jstores[si].at("params");
    if (jp.size() != ps.size()) throw std::runtime_error("checkpoint: parameter count mismatch");
    for (size_t i = 0; i < ps.size(); ++i) {
      Parameter& p = ps.at(i);
      if (jp[i].at("name").get<std::string>() != p.name ||
          jp[i].at("shape").get<std::vector<int>>() != p.value.shape)
        throw std::runtime_error("checkpoint: parameter mismatch at " + p.name);
      read_raw(in, p.value);
      std::fill(p.grad.data.begin(), p.grad.data.end(), 0.0);
    }
  }
  const auto& jadams = dir.at("adams");
  if (jadams.size() != opts.size()) throw std::runtime_error("checkpoint: optimizer count mismatch");
  for (size_t oi = 0; oi < opts.size(); ++oi) {
    if (!jadams[oi].at("present").get<bool>()) continue;
    if (!opts[oi]) throw std::runtime_error("checkpoint: optimizer slot missing");
    ParamStore& ps = *stores[oi];
    std::vector<Tensor> m, v;
    for (size_t i = 0; i < ps.size(); ++i) {
      m.emplace_back(ps.at(i).value.shape);
      read_raw(in, m.back());
    }
    for (size_t i = 0; i < ps.size(); ++i) {
      v.emplace_back(ps.at(i).value.shape);
      read_raw(in, v.back());
    }
    opts[oi]->restore(jadams[oi].at("t").get<i64>(), std::move(m), std::move(v));
  }
  return dir.at("meta");
}

nlohmann::json read_checkpoint_meta(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path.string());
  return read_header(in, path).at("meta");
}

}  // namespace ifsynth::nn
