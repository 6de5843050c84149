#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "sithss/partitioner.hpp"

namespace sithss {

namespace {
std::string format_g12(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}
}  // namespace

std::string dendrogram_to_json(const Dendrogram& dendrogram) {
  std::string out = "{\"initial_count\": " + std::to_string(dendrogram.initial_count) + ", \"events\": [";
  for (std::size_t i = 0; i < dendrogram.events.size(); ++i) {
    const auto& e = dendrogram.events[i];
    if (i) out += ", ";
    out += "{\"round\": " + std::to_string(e.round) + ", \"survivor\": " + std::to_string(e.survivor) +
           ", \"absorbed\": " + std::to_string(e.absorbed) + ", \"delta\": " + format_g12(e.delta) + "}";
  }
  out += "]}\n";
  return out;
}

Dendrogram dendrogram_from_json(const std::string& text) {
  const auto doc = nlohmann::json::parse(text);
  Dendrogram d;
  d.initial_count = doc.at("initial_count").get<std::int32_t>();
  for (const auto& e : doc.at("events")) {
    d.events.push_back({e.at("round").get<int>(), e.at("survivor").get<std::int32_t>(),
                        e.at("absorbed").get<std::int32_t>(), e.at("delta").get<double>()});
  }
  return d;
}

void write_dendrogram(const std::filesystem::path& path, const Dendrogram& dendrogram) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << dendrogram_to_json(dendrogram);
}

}  // namespace sithss
