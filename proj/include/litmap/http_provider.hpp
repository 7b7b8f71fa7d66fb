#pragma once

// Providers that talk to a mirror serving the same layout as the fixture
// directories:  GET <base>/citing/<key>.jsonl  and  GET <base>/meta/<key>.json
// 404 means "no data", anything else non-200 is a failure.

#include <chrono>
#include <mutex>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "litmap/crawler.hpp"

namespace litmap {

// Spaces requests at least 1/rate seconds apart across all callers.
class RateLimiter {
 public:
  explicit RateLimiter(double per_second) {
    if (per_second > 0) interval_ = std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(1.0 / per_second));
  }

  void acquire() {
    if (interval_ == Clock::duration::zero()) return;
    Clock::time_point slot;
    {
      std::lock_guard lock(mu_);
      const auto now = Clock::now();
      slot = std::max(now, next_);
      next_ = slot + interval_;
    }
    std::this_thread::sleep_until(slot);
  }

 private:
  using Clock = std::chrono::steady_clock;
  std::mutex mu_;
  Clock::duration interval_{};
  Clock::time_point next_{};
};

struct HttpProviderOptions {
  std::string base_url;  // scheme://host[:port]
  std::string path_prefix;
  double requests_per_second = 2.0;
  int timeout_seconds = 20;
  int retries = 2;  // extra attempts on connection errors and 5xx
};

namespace detail {

// Returns the body, or nullopt on 404.
inline std::optional<std::string> http_get(const HttpProviderOptions& opt, RateLimiter& limiter, const std::string& path) {
  std::string last_error;
  for (int attempt = 0; attempt <= opt.retries; ++attempt) {
    limiter.acquire();
    httplib::Client cli(opt.base_url);
    cli.set_connection_timeout(opt.timeout_seconds, 0);
    cli.set_read_timeout(opt.timeout_seconds, 0);
    auto res = cli.Get(opt.path_prefix + path);
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status == 200) return res->body;
    if (res->status == 404) return std::nullopt;
    last_error = "HTTP " + std::to_string(res->status);
    if (res->status < 500) break;
  }
  throw ProviderError(opt.base_url + opt.path_prefix + path + ": " + last_error);
}

}  // namespace detail

class HttpCitationProvider : public CitationProvider {
 public:
  explicit HttpCitationProvider(HttpProviderOptions opt) : opt_(std::move(opt)), limiter_(opt_.requests_per_second) {}

  ProviderCapabilities capabilities() const override { return {0, opt_.requests_per_second}; }

  std::vector<Reference> citing(const Reference& cited) override {
    const std::string path = "/citing/" + fixture_key(cited.id) + ".jsonl";
    auto body = detail::http_get(opt_, limiter_, path);
    if (!body) return {};
    try {
      return parse_jsonl_records(*body, opt_.base_url + path);
    } catch (const Error& e) {
      throw ProviderError(e.what());
    }
  }

 private:
  HttpProviderOptions opt_;
  RateLimiter limiter_;
};

class HttpMetadataProvider : public MetadataProvider {
 public:
  explicit HttpMetadataProvider(HttpProviderOptions opt) : opt_(std::move(opt)), limiter_(opt_.requests_per_second) {}

  ProviderCapabilities capabilities() const override { return {0, opt_.requests_per_second}; }

  std::optional<MetadataRecord> lookup(const Reference& ref) override {
    const std::string path = "/meta/" + fixture_key(ref.id) + ".json";
    auto body = detail::http_get(opt_, limiter_, path);
    if (!body) return std::nullopt;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(*body);
    } catch (const std::exception& e) {
      throw ProviderError(opt_.base_url + path + ": " + e.what());
    }
    return metadata_from_json(j, opt_.base_url + path);
  }

 private:
  HttpProviderOptions opt_;
  RateLimiter limiter_;
};

}  // namespace litmap
