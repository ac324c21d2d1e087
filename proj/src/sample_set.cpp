#include <algorithm>
#include <cmath>
#include <map>

#include "cqubo/error.hpp"
#include "cqubo/solvers.hpp"

namespace cqubo {

bool lexicographically_less(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

namespace {

// Sort by energy; runs of energies chained within the tie tolerance are
// ordered lexicographically.
void sort_records(std::vector<SampleRecord>& records) {
    std::sort(records.begin(), records.end(), [](const SampleRecord& x, const SampleRecord& y) {
        if (x.energy != y.energy) return x.energy < y.energy;
        return lexicographically_less(x.assignment, y.assignment);
    });
    auto run_begin = records.begin();
    while (run_begin != records.end()) {
        auto run_end = run_begin + 1;
        while (run_end != records.end() && run_end->energy - (run_end - 1)->energy <= kEnergyTieTolerance)
            ++run_end;
        std::sort(run_begin, run_end, [](const SampleRecord& x, const SampleRecord& y) {
            return lexicographically_less(x.assignment, y.assignment);
        });
        run_begin = run_end;
    }
}

}  // namespace

SampleSet SampleSet::from_assignments(const QuboModel& model, std::vector<BitAssignment> samples,
                                      SampleMetadata meta) {
    std::map<BitAssignment, std::size_t> counts;
    for (auto& s : samples) ++counts[std::move(s)];
    SampleSet out;
    out.meta_ = std::move(meta);
    out.records_.reserve(counts.size());
    for (auto& [a, count] : counts) {
        const double e = model.energy(a);
        out.records_.push_back({a, e, count});
    }
    sort_records(out.records_);
    return out;
}

SampleSet SampleSet::from_records(const QuboModel& model, std::vector<SampleRecord> records,
                                  SampleMetadata meta) {
    std::map<BitAssignment, std::size_t> position;
    SampleSet out;
    out.meta_ = std::move(meta);
    for (auto& r : records) {
        const double e = model.energy(r.assignment);
        if (!(std::abs(e - r.energy) <= kEnergyTieTolerance)) {
            throw RuntimeFailure("sample energy " + std::to_string(r.energy) +
                                 " disagrees with model energy " + std::to_string(e));
        }
        if (r.multiplicity == 0) continue;
        auto [it, inserted] = position.emplace(r.assignment, out.records_.size());
        if (inserted)
            out.records_.push_back(std::move(r));
        else
            out.records_[it->second].multiplicity += r.multiplicity;
    }
    sort_records(out.records_);
    return out;
}

std::size_t SampleSet::total_count() const {
    std::size_t total = 0;
    for (const auto& r : records_) total += r.multiplicity;
    return total;
}

const SampleRecord& SampleSet::best() const {
    if (records_.empty()) throw RuntimeFailure("sample set is empty");
    return records_.front();
}

}  // namespace cqubo
