// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <condition_variable>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "caslite/statement.hpp"

namespace caslite {

struct CacheEntry {
  Json query;
  Json statement;  // exactly as the authority sent it
  Timestamp fetched_at;
  Timestamp expires_at;
};

struct RefreshReport {
  std::vector<Json> updated;
  std::vector<std::pair<Json, std::string>> failed;  // query, error text
};

// Throws Error(Malformed) unless `query` is a user_rights or resource_rights
// query payload.
void validate_query(const Json& query);
// A JSON array of query payloads.
std::vector<Json> load_subscriptions(const std::filesystem::path& path);

// Partial mirror of the authority's signed statements. It holds no signing
// key and never alters a statement, so clients verify what it serves against
// the authority's key. Failed refreshes keep the previous entry.
class CacheMirror {
 public:
  // Requires refresh_interval < max_age.
  CacheMirror(Seconds refresh_interval, Seconds max_age,
              std::shared_ptr<StatementSource> authority);

  // Idempotent; the first fetch happens immediately. Fetch failures show up
  // later as CacheMiss.
  void subscribe(const Json& query, Timestamp now);
  RefreshReport refresh(Timestamp now);
  // Refreshes when refresh_interval has passed since the last refresh.
  std::optional<RefreshReport> tick(Timestamp now);

  // Served iff now - fetched_at <= max_age and now < expires_at.
  // Errors: CacheMiss, StaleEntry.
  Json serve_cached(const Json& query, Timestamp now) const;

  std::optional<CacheEntry> entry(const Json& query) const;
  std::size_t subscription_count() const;

  // Wire kinds: query (payload is the query; any chain is ignored) and ping,
  // which also lists each entry's fetched_at and expires_at.
  Json handle(const Json& request, Timestamp now) const;

  Seconds refresh_interval() const { return refresh_interval_; }
  Seconds max_age() const { return max_age_; }

 private:
  using Entries = std::map<std::string, CacheEntry>;

  std::optional<CacheEntry> fetch(const Json& query, Timestamp now, std::string* error);
  void store(std::vector<CacheEntry> fresh);

  Seconds refresh_interval_;
  Seconds max_age_;
  std::shared_ptr<StatementSource> authority_;

  mutable std::mutex mu_;
  std::map<std::string, Json> subscriptions_;  // canonical query -> query
  std::shared_ptr<const Entries> entries_ = std::make_shared<const Entries>();
  std::optional<Timestamp> last_refresh_;
  std::mutex refresh_mu_;
};

// Calls mirror.tick(clock()) every `poll` until destroyed.
class MirrorRefresher {
 public:
  MirrorRefresher(CacheMirror& mirror, Clock clock,
                  std::chrono::milliseconds poll = std::chrono::milliseconds(100));
  ~MirrorRefresher();
  MirrorRefresher(const MirrorRefresher&) = delete;
  MirrorRefresher& operator=(const MirrorRefresher&) = delete;

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  bool stop_ = false;
  std::thread worker_;
};

}  // namespace caslite
