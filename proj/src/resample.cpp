#include "sbt/resample.hpp"

#include <random>

namespace sbt {

std::uint64_t entropy_seed() {
    std::random_device rd;
    return (std::uint64_t{rd()} << 32) ^ std::uint64_t{rd()};
}

ResampleSpec::ResampleSpec(Index n_boot, std::optional<std::uint64_t> master_seed, std::optional<Index> sample_size,
                           bool replace)
    : n_boot_(n_boot), master_seed_(master_seed), sample_size_(sample_size), replace_(replace) {
    if (n_boot_ < 1) throw ConfigError("n_boot must be at least 1 (got " + std::to_string(n_boot_) + ")");
    if (sample_size_ && *sample_size_ < 1)
        throw ConfigError("sample_size must be at least 1 (got " + std::to_string(*sample_size_) + ")");
}

Index ResampleSpec::effective_size(Index stratum_size) const {
    const Index size = sample_size_.value_or(stratum_size);
    if (!replace_ && size > stratum_size)
        throw ConfigError("cannot draw " + std::to_string(size) + " rows without replacement from a stratum of " +
                          std::to_string(stratum_size));
    return size;
}

std::uint64_t ResampleSpec::resolve_seed() const { return master_seed_ ? *master_seed_ : entropy_seed(); }

ResampleSpec ResampleSpec::with_seed(std::uint64_t seed) const {
    return ResampleSpec(n_boot_, seed, sample_size_, replace_);
}

void draw_stratum(std::span<const Index> stratum, Index size, bool replace, ReplicateStream& stream,
                  std::vector<Index>& out) {
    const auto m = static_cast<std::uint64_t>(stratum.size());
    if (m == 0) throw DataError("cannot resample an empty stratum");
    if (replace) {
        for (Index s = 0; s < size; ++s) out.push_back(stratum[stream.below(m)]);
        return;
    }
    if (static_cast<std::uint64_t>(size) > m)
        throw ConfigError("cannot draw " + std::to_string(size) + " rows without replacement from a stratum of " +
                          std::to_string(m));
    std::vector<Index> pool(stratum.begin(), stratum.end());
    for (Index s = 0; s < size; ++s) {
        const auto pick = static_cast<std::size_t>(s) + stream.below(m - static_cast<std::uint64_t>(s));
        std::swap(pool[static_cast<std::size_t>(s)], pool[pick]);
        out.push_back(pool[static_cast<std::size_t>(s)]);
    }
}

ReplicateDraw draw_replicate(const GroupPartition& partition, const ResampleSpec& spec, std::uint64_t seed,
                             Index replicate_index, std::uint32_t stream_key) {
    if (replicate_index < 0 || replicate_index >= spec.n_boot())
        throw ConfigError("replicate index " + std::to_string(replicate_index) + " outside [0, n_boot)");
    auto stream = derive_stream(seed, static_cast<std::uint64_t>(replicate_index), stream_key);
    ReplicateDraw draw;
    draw.replicate_index = replicate_index;
    draw.per_stratum_rows.resize(partition.index_sets.size());
    for (std::size_t g = 0; g < partition.index_sets.size(); ++g) {
        const auto& stratum = partition.index_sets[g];
        const Index size = spec.effective_size(static_cast<Index>(stratum.size()));
        draw.per_stratum_rows[g].reserve(static_cast<std::size_t>(size));
        draw_stratum(stratum, size, spec.replace(), stream, draw.per_stratum_rows[g]);
    }
    return draw;
}

ReplicateDraw draw_replicate(const GroupPartition& partition, const ResampleSpec& spec, Index replicate_index,
                             std::uint32_t stream_key) {
    if (!spec.master_seed()) throw ConfigError("draw_replicate without a seed needs a resolved seed");
    return draw_replicate(partition, spec, *spec.master_seed(), replicate_index, stream_key);
}

}  // namespace sbt
