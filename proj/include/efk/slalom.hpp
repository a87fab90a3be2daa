#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "efk/filterlab.hpp"

/// Slalom covers over a finite window: families of functions [0,N) -> [0,V)
/// covered by capacity-bounded cell sequences, either at every index or only
/// on the active window {n in [n0, N) : k_n > c}.
namespace efk {

struct WindowFunctionFamily {
    int length = 0;       // N
    int value_bound = 0;  // V
    std::vector<std::vector<int>> fns;

    void validate() const;  // throws on out-of-range values or length mismatch
};

struct Slalom {
    std::vector<long long> capacity;     // g(n)
    std::vector<std::vector<int>> cells; // sorted, |cells[n]| <= capacity[n]

    void validate() const;
};

/// Which indices a cover must hit: every one, or only the active window of an
/// attached k-sequence.
struct CoverMode {
    enum class Kind { everywhere, filtered };

    Kind kind = Kind::everywhere;
    long long c = 0;
    long long n0 = 0;
    const KSeqSpec* kseq = nullptr;  // required in filtered mode

    static CoverMode everywhere();
    static CoverMode filtered(long long c, long long n0, const KSeqSpec& kseq);

    /// The required index set within [0, len).
    std::vector<int> required_indices(int len) const;
};

struct CoverFailure {
    int fn_index = -1;  // first uncovered function
    // first failing index per slalom, aligned with the family passed in
    std::vector<std::pair<int, int>> per_slalom;  // (slalom index, failing n)
};

struct CoverReport {
    bool covered = false;
    std::vector<std::optional<int>> witness;  // per function: covering slalom
    std::optional<CoverFailure> failure;
};

CoverReport check_cover(const WindowFunctionFamily& h, const std::vector<Slalom>& family,
                        const CoverMode& mode);

struct Infeasibility {
    int index = -1;            // violating n
    std::vector<int> values;   // value multiset of the family at n, input order
};

using SingleCoverResult = std::variant<Slalom, Infeasibility>;

/// The union-of-values slalom: cells(n) = {eta(n) : eta in H} on required
/// indices (truncated to capacity elsewhere).  Feasible iff the distinct
/// value count respects g on every required index.
SingleCoverResult single_slalom_cover(const WindowFunctionFamily& h,
                                      const std::vector<long long>& capacity,
                                      const CoverMode& mode);

struct GreedyCover {
    std::vector<Slalom> family;
    std::vector<int> assignment;  // function -> slalom index
};

using GreedyResult = std::variant<GreedyCover, Infeasibility>;

/// First-fit in input order: each function joins the first slalom whose
/// augmented cells stay within capacity, else opens a new one.
GreedyResult greedy_cover(const WindowFunctionFamily& h, const std::vector<long long>& capacity,
                          const CoverMode& mode);

struct MinCover {
    int size = 0;
    std::vector<Slalom> family;
    std::vector<int> assignment;
};

struct BoundExceeded {
    int limit = 0;
};

using MinCoverResult = std::variant<MinCover, Infeasibility, BoundExceeded>;

/// Exact minimum number of capacity-g slaloms covering H, by branch-and-bound
/// over set partitions (a minimal cover can always be made a partition).
MinCoverResult min_cover_exact(const WindowFunctionFamily& h,
                               const std::vector<long long>& capacity, const CoverMode& mode,
                               int exhaustive_bound = 10);

/// Family file format: `#family N=.. V=..`, one function per line as N
/// space-separated values, and a `#g v0 v1 ...` capacity line.
struct FamilyFile {
    WindowFunctionFamily family;
    std::vector<long long> capacity;
};

FamilyFile parse_family_file(const std::string& text);
FamilyFile load_family_file(const std::string& path);

}  // namespace efk
