#pragma once

#include "sbt/errors.hpp"
#include "sbt/ingest.hpp"
#include "sbt/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

namespace sbt {

/// Bootstrap configuration. Construction validates n_boot >= 1 and
/// sample_size >= 1.
class ResampleSpec {
public:
    static constexpr Index kDefaultBoot = 1000;

    explicit ResampleSpec(Index n_boot = kDefaultBoot, std::optional<std::uint64_t> master_seed = std::nullopt,
                          std::optional<Index> sample_size = std::nullopt, bool replace = true);

    Index n_boot() const { return n_boot_; }
    std::optional<std::uint64_t> master_seed() const { return master_seed_; }
    std::optional<Index> sample_size() const { return sample_size_; }
    bool replace() const { return replace_; }

    /// Rows drawn from a stratum of the given size. Throws ConfigError when
    /// sampling without replacement asks for more rows than exist.
    Index effective_size(Index stratum_size) const;

    /// The master seed, or a fresh entropy seed when none was set.
    std::uint64_t resolve_seed() const;

    /// Same spec with the seed pinned.
    ResampleSpec with_seed(std::uint64_t seed) const;

private:
    Index n_boot_;
    std::optional<std::uint64_t> master_seed_;
    std::optional<Index> sample_size_;
    bool replace_;
};

struct ReplicateDraw {
    Index replicate_index = 0;
    std::vector<std::vector<Index>> per_stratum_rows;
};

/// Appends `size` rows drawn uniformly from `stratum` to `out`. Without
/// replacement this is a partial Fisher-Yates shuffle of a copy.
void draw_stratum(std::span<const Index> stratum, Index size, bool replace, ReplicateStream& stream,
                  std::vector<Index>& out);

/// Resamples every stratum of `partition` (in level order) from
/// derive_stream(seed, replicate_index, stream_key).
ReplicateDraw draw_replicate(const GroupPartition& partition, const ResampleSpec& spec, std::uint64_t seed,
                             Index replicate_index, std::uint32_t stream_key = 0);

/// Uses the spec's master seed; throws ConfigError when none is set.
ReplicateDraw draw_replicate(const GroupPartition& partition, const ResampleSpec& spec, Index replicate_index,
                             std::uint32_t stream_key = 0);

/// Thrown when a per-replicate consumer fails; wraps the original message.
class ReplicateError : public std::runtime_error {
public:
    ReplicateError(Index replicate, const std::string& what)
        : std::runtime_error("replicate " + std::to_string(replicate) + ": " + what), replicate_(replicate) {}
    Index replicate() const noexcept { return replicate_; }

private:
    Index replicate_;
};

/// Folds `consumer(b)` for b in [0, count) with `Acc += Acc`. Replicates are
/// split into fixed blocks of `kFoldBlock`; each block is folded in index
/// order and blocks are combined in block order, so the result does not
/// depend on `workers` even for non-associative accumulators.
template <typename Acc, typename Consumer>
Acc parallel_fold(Index count, Index workers, const Acc& identity, Consumer&& consumer) {
    constexpr Index kFoldBlock = 256;
    if (workers < 1) throw ConfigError("worker count must be at least 1");
    const Index blocks = (count + kFoldBlock - 1) / kFoldBlock;
    std::vector<Acc> partial(static_cast<std::size_t>(blocks), identity);

    std::atomic<Index> next{0};
    std::atomic<bool> failed{false};
    std::mutex error_mutex;
    std::optional<Index> failing;
    std::string failure;

    auto work = [&] {
        for (Index blk = next++; blk < blocks && !failed.load(); blk = next++) {
            const Index begin = blk * kFoldBlock;
            const Index end = std::min(count, begin + kFoldBlock);
            Acc& acc = partial[static_cast<std::size_t>(blk)];
            for (Index b = begin; b < end; ++b) {
                try {
                    acc += consumer(b);
                } catch (const std::exception& e) {
                    std::lock_guard lock(error_mutex);
                    if (!failing || b < *failing) {
                        failing = b;
                        failure = e.what();
                    }
                    failed = true;
                    return;
                }
            }
        }
    };

    const Index threads = std::min(workers, std::max<Index>(blocks, 1));
    if (threads <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (Index t = 0; t < threads; ++t) pool.emplace_back(work);
    }
    if (failing) throw ReplicateError(*failing, failure);

    Acc total = identity;
    for (const auto& p : partial) total += p;
    return total;
}

/// Applies `consumer(const ReplicateDraw&)` to every replicate of `spec`
/// and folds the results. Deterministic in (seed, stream_key) for any
/// worker count.
template <typename Acc, typename Consumer>
Acc run_replicates(const GroupPartition& partition, const ResampleSpec& spec, std::uint64_t seed, Index workers,
                   const Acc& identity, Consumer&& consumer, std::uint32_t stream_key = 0) {
    for (Index g = 0; g < partition.group_count(); ++g) spec.effective_size(partition.size(g));
    return parallel_fold(spec.n_boot(), workers, identity, [&](Index b) {
        return consumer(draw_replicate(partition, spec, seed, b, stream_key));
    });
}

}  // namespace sbt
