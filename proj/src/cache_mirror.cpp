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

#include "caslite/cache_mirror.hpp"

#include "caslite/file_util.hpp"
#include "caslite/wire.hpp"

namespace caslite {

void validate_query(const Json& query) {
  if (!query.is_object()) throw Error(ErrorCode::Malformed, "query must be an object");
  std::string kind = field::string(query, "query");
  if (kind == "user_rights") {
    field::only(query, {"query", "subject"});
    Identity(field::string(query, "subject"));
  } else if (kind == "resource_rights") {
    field::only(query, {"query", "namespace"});
    ObjectPattern(field::string(query, "namespace"));
  } else {
    throw Error(ErrorCode::Malformed, "unknown query '" + kind + "'");
  }
}

std::vector<Json> load_subscriptions(const std::filesystem::path& path) {
  Json doc;
  try {
    doc = Json::parse(read_file(path));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::Malformed, "'" + path.string() + "': " + e.what());
  }
  if (!doc.is_array()) throw Error(ErrorCode::Malformed, "'" + path.string() + "' must hold a JSON array");
  for (const auto& q : doc) validate_query(q);
  return doc.get<std::vector<Json>>();
}

CacheMirror::CacheMirror(Seconds refresh_interval, Seconds max_age,
                         std::shared_ptr<StatementSource> authority)
    : refresh_interval_(refresh_interval), max_age_(max_age), authority_(std::move(authority)) {
  if (refresh_interval_ <= Seconds{0} || refresh_interval_ >= max_age_) {
    throw Error(ErrorCode::Malformed, "need 0 < refresh interval < max age");
  }
}

std::optional<CacheEntry> CacheMirror::fetch(const Json& query, Timestamp now, std::string* error) {
  try {
    Json doc = authority_->fetch(query, now);
    SignedStatement s = SignedStatement::from_json(doc);
    if (s.query != query) throw Error(ErrorCode::Malformed, "authority answered a different query");
    return CacheEntry{query, std::move(doc), now, s.expires_at};
  } catch (const std::exception& e) {
    *error = e.what();
    return std::nullopt;
  }
}

void CacheMirror::store(std::vector<CacheEntry> fresh) {
  if (fresh.empty()) return;
  std::lock_guard<std::mutex> lock(mu_);
  auto next = std::make_shared<Entries>(*entries_);
  for (auto& e : fresh) {
    std::string key = canonical(e.query);
    (*next)[key] = std::move(e);
  }
  entries_ = std::move(next);
}

void CacheMirror::subscribe(const Json& query, Timestamp now) {
  validate_query(query);
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (!subscriptions_.emplace(canonical(query), query).second) return;
  }
  std::lock_guard<std::mutex> refreshing(refresh_mu_);
  std::string error;
  if (auto e = fetch(query, now, &error)) store({std::move(*e)});
}

RefreshReport CacheMirror::refresh(Timestamp now) {
  std::lock_guard<std::mutex> refreshing(refresh_mu_);
  std::vector<Json> queries;
  {
    std::lock_guard<std::mutex> lock(mu_);
    last_refresh_ = now;
    for (const auto& [_, q] : subscriptions_) queries.push_back(q);
  }
  RefreshReport report;
  std::vector<CacheEntry> fresh;
  for (const auto& q : queries) {
    std::string error;
    if (auto e = fetch(q, now, &error)) {
      fresh.push_back(std::move(*e));
      report.updated.push_back(q);
    } else {
      report.failed.emplace_back(q, error);
    }
  }
  store(std::move(fresh));
  return report;
}

std::optional<RefreshReport> CacheMirror::tick(Timestamp now) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (last_refresh_ && now < *last_refresh_ + refresh_interval_) return std::nullopt;
  }
  return refresh(now);
}

Json CacheMirror::serve_cached(const Json& query, Timestamp now) const {
  auto e = entry(query);
  if (!e) throw Error(ErrorCode::CacheMiss, "no cached statement for " + canonical(query));
  if (now - e->fetched_at > max_age_) {
    throw Error(ErrorCode::StaleEntry, "cached statement is older than the maximum age");
  }
  if (now >= e->expires_at) throw Error(ErrorCode::StaleEntry, "cached statement has expired");
  return e->statement;
}

std::optional<CacheEntry> CacheMirror::entry(const Json& query) const {
  std::shared_ptr<const Entries> snapshot;
  {
    std::lock_guard<std::mutex> lock(mu_);
    snapshot = entries_;
  }
  auto it = snapshot->find(canonical(query));
  if (it == snapshot->end()) return std::nullopt;
  return it->second;
}

std::size_t CacheMirror::subscription_count() const {
  std::lock_guard<std::mutex> lock(mu_);
  return subscriptions_.size();
}

Json CacheMirror::handle(const Json& request, Timestamp now) const {
  try {
    if (!request.is_object()) throw Error(ErrorCode::Malformed, "request must be an object");
    field::only(request, {"kind", "payload", "chain", "proof"});
    std::string kind = field::string(request, "kind");
    const Json& payload = field::require(request, "payload");
    if (kind == "query") return ok_response(serve_cached(payload, now));
    if (kind == "ping") {
      std::shared_ptr<const Entries> snapshot;
      {
        std::lock_guard<std::mutex> lock(mu_);
        snapshot = entries_;
      }
      Json entries = Json::array();
      for (const auto& [key, e] : *snapshot) {
        entries.push_back({{"query", e.query},
                           {"fetched_at", to_unix(e.fetched_at)},
                           {"expires_at", to_unix(e.expires_at)}});
      }
      return ok_response(Json{{"subscriptions", subscription_count()},
                              {"mirror", true},
                              {"max_age", max_age_.count()},
                              {"entries", entries}});
    }
    throw Error(ErrorCode::Malformed, "the mirror only answers query and ping, not '" + kind + "'");
  } catch (const Error& e) {
    return error_response(e);
  }
}

MirrorRefresher::MirrorRefresher(CacheMirror& mirror, Clock clock, std::chrono::milliseconds poll) {
  worker_ = std::thread([this, &mirror, clock = std::move(clock), poll] {
    std::unique_lock<std::mutex> lock(mu_);
    while (!stop_) {
      lock.unlock();
      mirror.tick(clock());
      lock.lock();
      cv_.wait_for(lock, poll, [this] { return stop_; });
    }
  });
}

MirrorRefresher::~MirrorRefresher() {
  {
    std::lock_guard<std::mutex> lock(mu_);
    stop_ = true;
  }
  cv_.notify_all();
  worker_.join();
}

}  // namespace caslite
