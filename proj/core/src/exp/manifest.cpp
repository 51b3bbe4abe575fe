#include "ilb/exp/manifest.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include "detail/json_io.hpp"
#include "ilb/errors.hpp"

namespace ilb {

namespace {

struct DigestContext {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx{EVP_MD_CTX_new(), &EVP_MD_CTX_free};

  DigestContext() {
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error("sha256: init failed");
  }
  void update(const void* data, std::size_t n) {
    if (EVP_DigestUpdate(ctx.get(), data, n) != 1) throw Error("sha256: update failed");
  }
  std::string hex() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx.get(), md, &len) != 1) throw Error("sha256: final failed");
    std::ostringstream o;
    for (unsigned int i = 0; i < len; ++i) o << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return o.str();
  }
};

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  DigestContext d;
  d.update(bytes.data(), bytes.size());
  return d.hex();
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  DigestContext d;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    if (in.gcount() > 0) d.update(buf, static_cast<std::size_t>(in.gcount()));
  }
  return d.hex();
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream o;
  o << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return o.str();
}

void write_manifest(const std::filesystem::path& dir, RunManifest manifest, const std::vector<std::string>& files) {
  manifest.files.clear();
  detail::Json list = detail::Json::array();
  for (const auto& f : files) {
    const auto p = dir / f;
    ManifestEntry e{f, sha256_file(p), std::filesystem::file_size(p)};
    list.push_back({{"path", e.path}, {"sha256", e.sha256}, {"bytes", e.bytes}});
    manifest.files.push_back(std::move(e));
  }
  if (manifest.finished_at.empty()) manifest.finished_at = utc_timestamp();
  detail::write_json_file(dir / "manifest.json", {{"command", manifest.command},
                                                  {"config_hash", manifest.config_hash},
                                                  {"tool_version", manifest.tool_version},
                                                  {"started_at", manifest.started_at},
                                                  {"finished_at", manifest.finished_at},
                                                  {"files", std::move(list)}});
}

RunManifest read_manifest(const std::filesystem::path& dir) {
  const auto j = detail::read_json_file(dir / "manifest.json");
  try {
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.config_hash = j.at("config_hash").get<std::string>();
    m.tool_version = j.at("tool_version").get<std::string>();
    m.started_at = j.at("started_at").get<std::string>();
    m.finished_at = j.at("finished_at").get<std::string>();
    for (const auto& f : j.at("files"))
      m.files.push_back({f.at("path").get<std::string>(), f.at("sha256").get<std::string>(),
                         f.at("bytes").get<std::uintmax_t>()});
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw IoError((dir / "manifest.json").string() + ": " + e.what());
  }
}

}  // namespace ilb
