#pragma once

#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "localmq/bits.hpp"
#include "localmq/distributions.hpp"
#include "localmq/persistent_noise.hpp"
#include "localmq/random.hpp"
#include "localmq/targets.hpp"

namespace localmq {

struct AuditSummary {
  std::uint64_t ex_count = 0;
  std::uint64_t mq_count = 0;
  int max_locality_used = 0;
  std::uint64_t distinct_mq_points = 0;
  std::uint64_t violations = 0;

  nlohmann::json to_json() const {
    return {{"ex_count", ex_count},
            {"mq_count", mq_count},
            {"max_locality_used", max_locality_used},
            {"distinct_mq_points", distinct_mq_points},
            {"violations", violations}};
  }
};

struct AuditRecord {
  bool is_mq = false;
  std::uint32_t point = 0;
  std::int64_t anchor = -1;
  int dist = 0;
  double resp = 0;
  std::uint64_t seq = 0;
};

struct Example {
  std::size_t index = 0;
  std::uint32_t bits = 0;
  double label = 0;
};

// Example source and query responder for sessions that do not wrap a plain
// (target, distribution) pair, e.g. the embedded-function simulator.
struct CustomOracle {
  int n = 0;
  Domain domain = Domain::plus_minus;
  std::function<std::pair<std::uint32_t, double>(SplitMix64&)> draw;
  std::function<double(std::uint32_t)> respond;
};

// The EX / r-local MQ gateway. Target labels are reachable only through
// draw_example and local_query.
struct SessionOptions {
  bool keep_trail = false;
  bool track_distinct = true;
};

class OracleSession {
 public:
  using Options = SessionOptions;

  OracleSession(TargetFunction target, Distribution dist, int locality, std::uint64_t seed,
                std::optional<NoiseWrapper> noise = std::nullopt, Options opts = {})
      : n_(localmq::dimension(target)),
        domain_(localmq::domain_of(target)),
        r_(locality),
        seed_(seed),
        opts_(opts),
        target_(std::move(target)),
        dist_(std::move(dist)),
        noise_(std::move(noise)) {
    if (dist_->dimension() != n_)
      throw ContractViolation("session: distribution dimension differs from the target's");
    if (dist_->domain() != domain_)
      throw ContractViolation("session: distribution domain differs from the target's");
    if (noise_ && !is_boolean(*target_))
      throw ContractViolation("session: label noise needs a Boolean target");
    init();
  }

  OracleSession(CustomOracle custom, int locality, std::uint64_t seed, Options opts = {})
      : n_(custom.n), domain_(custom.domain), r_(locality), seed_(seed), opts_(opts),
        custom_(std::move(custom)) {
    check_dimension(n_);
    init();
  }

  OracleSession(const OracleSession&) = delete;
  OracleSession& operator=(const OracleSession&) = delete;

  int dimension() const { return n_; }
  Domain domain() const { return domain_; }
  int locality() const { return r_; }
  std::uint64_t seed() const { return seed_; }
  const Distribution* distribution() const { return dist_ ? &*dist_ : nullptr; }
  const NoiseWrapper* noise() const { return noise_ ? &*noise_ : nullptr; }

  Example draw_example() {
    std::lock_guard lock(mu_);
    const std::uint64_t idx = drawn_.size();
    SplitMix64 rng(derive_seed(seed_, idx));
    std::uint32_t x;
    double y;
    if (custom_) {
      auto [px, py] = custom_->draw(rng);
      x = px;
      y = py;
    } else {
      x = dist_->sample(rng);
      y = label_of(x);
    }
    drawn_.push_back(x);
    ++summary_.ex_count;
    log(AuditRecord{false, x, -1, 0, y, seq_++});
    return Example{static_cast<std::size_t>(idx), x, y};
  }

  double local_query(std::uint32_t query, std::size_t anchor) {
    std::lock_guard lock(mu_);
    if (anchor >= drawn_.size())
      throw ContractViolation("local_query: anchor " + std::to_string(anchor) +
                              " does not index a drawn example");
    if ((query & ~full_set(n_)) != 0)
      throw ContractViolation("local_query: query has bits beyond the dimension");
    const int dist = hamming_distance(query, drawn_[anchor]);
    if (dist > r_) {
      ++summary_.violations;
      throw LocalityViolation(dist, r_);
    }
    const double y = custom_ ? custom_->respond(query) : label_of(query);
    ++summary_.mq_count;
    summary_.max_locality_used = std::max(summary_.max_locality_used, dist);
    if (opts_.track_distinct) note_distinct(query);
    log(AuditRecord{true, query, static_cast<std::int64_t>(anchor), dist, y, seq_++});
    return y;
  }

  double local_query(const Point& q, std::size_t anchor) {
    if (q.n != n_ || q.domain != domain_)
      throw ContractViolation("local_query: point dimension or domain mismatch");
    return local_query(q.bits, anchor);
  }

  std::uint32_t example_point(std::size_t idx) const {
    std::lock_guard lock(mu_);
    if (idx >= drawn_.size()) throw ContractViolation("example index out of range");
    return drawn_[idx];
  }

  std::size_t example_count() const {
    std::lock_guard lock(mu_);
    return drawn_.size();
  }

  AuditSummary audit_report() const {
    std::lock_guard lock(mu_);
    AuditSummary s = summary_;
    s.distinct_mq_points = opts_.track_distinct ? distinct_count_ : 0;
    return s;
  }

  const std::vector<AuditRecord>& trail() const { return trail_; }

  // One JSON object per line.
  void write_trail(std::ostream& os) const {
    std::lock_guard lock(mu_);
    for (const auto& r : trail_) {
      nlohmann::json j{{"op", r.is_mq ? "mq" : "ex"},
                       {"point", Point(r.point, n_, domain_).bitstring()},
                       {"anchor", r.anchor >= 0 ? nlohmann::json(r.anchor) : nlohmann::json(nullptr)},
                       {"dist", r.dist},
                       {"resp", r.resp},
                       {"seq", r.seq}};
      if (noise_) j["noisy"] = true;
      os << j.dump() << '\n';
    }
  }

 private:
  void init() {
    if (opts_.track_distinct && n_ <= 24) seen_bitmap_.assign(std::size_t{1} << n_, false);
  }

  double label_of(std::uint32_t x) const {
    const double y = evaluate_bits(*target_, x);
    return noise_ ? noise_->apply(x, y) : y;
  }

  void note_distinct(std::uint32_t q) {
    if (!seen_bitmap_.empty()) {
      if (!seen_bitmap_[q]) {
        seen_bitmap_[q] = true;
        ++distinct_count_;
      }
    } else if (seen_set_.insert(q).second) {
      ++distinct_count_;
    }
  }

  void log(const AuditRecord& r) {
    if (opts_.keep_trail) trail_.push_back(r);
  }

  int n_;
  Domain domain_;
  int r_;
  std::uint64_t seed_;
  Options opts_;
  std::optional<TargetFunction> target_;
  std::optional<Distribution> dist_;
  std::optional<NoiseWrapper> noise_;
  std::optional<CustomOracle> custom_;

  mutable std::mutex mu_;
  std::vector<std::uint32_t> drawn_;
  std::vector<AuditRecord> trail_;
  AuditSummary summary_;
  std::uint64_t seq_ = 0;
  std::vector<bool> seen_bitmap_;
  std::unordered_set<std::uint32_t> seen_set_;
  std::uint64_t distinct_count_ = 0;
};

}  // namespace localmq
