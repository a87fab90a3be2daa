#include "efk/slalom.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace efk {

void WindowFunctionFamily::validate() const {
    if (length < 0 || value_bound < 0) throw std::invalid_argument("negative family parameter");
    for (const auto& fn : fns) {
        if (static_cast<int>(fn.size()) != length) {
            throw std::invalid_argument("function length differs from the window");
        }
        for (int v : fn) {
            if (v < 0 || v >= value_bound) throw std::invalid_argument("function value outside [0, V)");
        }
    }
}

void Slalom::validate() const {
    if (capacity.size() != cells.size()) throw std::invalid_argument("slalom length mismatch");
    for (std::size_t n = 0; n < cells.size(); ++n) {
        if (static_cast<long long>(cells[n].size()) > capacity[n]) {
            throw std::invalid_argument("slalom cell exceeds capacity at index " + std::to_string(n));
        }
        if (!std::is_sorted(cells[n].begin(), cells[n].end())) {
            throw std::invalid_argument("slalom cells must be sorted");
        }
    }
}

CoverMode CoverMode::everywhere() { return {}; }

CoverMode CoverMode::filtered(long long c, long long n0, const KSeqSpec& kseq) {
    CoverMode m;
    m.kind = Kind::filtered;
    m.c = c;
    m.n0 = n0;
    m.kseq = &kseq;
    return m;
}

std::vector<int> CoverMode::required_indices(int len) const {
    std::vector<int> out;
    if (kind == Kind::everywhere) {
        for (int n = 0; n < len; ++n) out.push_back(n);
        return out;
    }
    if (kseq == nullptr) throw std::invalid_argument("filtered mode needs a k-sequence");
    for (int n = 0; n < len; ++n) {
        if (n >= n0 && kseq->value_at(n) > c) out.push_back(n);
    }
    return out;
}

namespace {

// first required index where the slalom misses the function, if any
std::optional<int> first_miss(const std::vector<int>& fn, const Slalom& s,
                              const std::vector<int>& required) {
    for (int n : required) {
        const auto& cell = s.cells[static_cast<std::size_t>(n)];
        if (!std::binary_search(cell.begin(), cell.end(), fn[static_cast<std::size_t>(n)])) {
            return n;
        }
    }
    return std::nullopt;
}

}  // namespace

CoverReport check_cover(const WindowFunctionFamily& h, const std::vector<Slalom>& family,
                        const CoverMode& mode) {
    h.validate();
    for (const Slalom& s : family) {
        s.validate();
        if (static_cast<int>(s.cells.size()) != h.length) {
            throw std::invalid_argument("slalom length differs from the family window");
        }
    }
    std::vector<int> required = mode.required_indices(h.length);
    CoverReport report;
    report.covered = true;
    for (std::size_t i = 0; i < h.fns.size(); ++i) {
        std::optional<int> witness;
        std::vector<std::pair<int, int>> misses;
        for (std::size_t j = 0; j < family.size(); ++j) {
            auto miss = first_miss(h.fns[i], family[j], required);
            if (!miss) {
                witness = static_cast<int>(j);
                break;
            }
            misses.push_back({static_cast<int>(j), *miss});
        }
        report.witness.push_back(witness);
        if (!witness && report.covered) {
            report.covered = false;
            report.failure = CoverFailure{static_cast<int>(i), std::move(misses)};
        }
    }
    return report;
}

namespace {

std::vector<std::set<int>> value_sets(const WindowFunctionFamily& h,
                                      const std::vector<std::size_t>& members) {
    std::vector<std::set<int>> values(static_cast<std::size_t>(h.length));
    for (std::size_t i : members) {
        for (int n = 0; n < h.length; ++n) {
            values[static_cast<std::size_t>(n)].insert(h.fns[i][static_cast<std::size_t>(n)]);
        }
    }
    return values;
}

SingleCoverResult cover_members(const WindowFunctionFamily& h,
                                const std::vector<long long>& capacity, const CoverMode& mode,
                                const std::vector<std::size_t>& members) {
    std::vector<int> required = mode.required_indices(h.length);
    std::vector<char> is_required(static_cast<std::size_t>(h.length), 0);
    for (int n : required) is_required[static_cast<std::size_t>(n)] = 1;
    auto values = value_sets(h, members);
    for (int n : required) {
        if (static_cast<long long>(values[static_cast<std::size_t>(n)].size()) >
            capacity[static_cast<std::size_t>(n)]) {
            Infeasibility inf;
            inf.index = n;
            for (std::size_t i : members) inf.values.push_back(h.fns[i][static_cast<std::size_t>(n)]);
            return inf;
        }
    }
    Slalom s;
    s.capacity = capacity;
    s.cells.resize(static_cast<std::size_t>(h.length));
    for (int n = 0; n < h.length; ++n) {
        auto& cell = s.cells[static_cast<std::size_t>(n)];
        cell.assign(values[static_cast<std::size_t>(n)].begin(),
                    values[static_cast<std::size_t>(n)].end());
        if (!is_required[static_cast<std::size_t>(n)] &&
            static_cast<long long>(cell.size()) > capacity[static_cast<std::size_t>(n)]) {
            cell.resize(static_cast<std::size_t>(capacity[static_cast<std::size_t>(n)]));
        }
    }
    return s;
}

bool part_feasible(const WindowFunctionFamily& h, const std::vector<long long>& capacity,
                   const std::vector<int>& required, const std::vector<std::size_t>& members) {
    for (int n : required) {
        std::set<int> vals;
        for (std::size_t i : members) vals.insert(h.fns[i][static_cast<std::size_t>(n)]);
        if (static_cast<long long>(vals.size()) > capacity[static_cast<std::size_t>(n)]) return false;
    }
    return true;
}

void check_family_capacity(const WindowFunctionFamily& h, const std::vector<long long>& capacity) {
    h.validate();
    if (static_cast<int>(capacity.size()) != h.length) {
        throw std::invalid_argument("capacity length differs from the window");
    }
    for (long long g : capacity) {
        if (g < 0) throw std::invalid_argument("negative capacity");
    }
}

}  // namespace

SingleCoverResult single_slalom_cover(const WindowFunctionFamily& h,
                                      const std::vector<long long>& capacity,
                                      const CoverMode& mode) {
    check_family_capacity(h, capacity);
    std::vector<std::size_t> all(h.fns.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return cover_members(h, capacity, mode, all);
}

GreedyResult greedy_cover(const WindowFunctionFamily& h, const std::vector<long long>& capacity,
                          const CoverMode& mode) {
    check_family_capacity(h, capacity);
    std::vector<int> required = mode.required_indices(h.length);
    std::vector<std::vector<std::size_t>> parts;
    std::vector<int> assignment(h.fns.size(), -1);
    for (std::size_t i = 0; i < h.fns.size(); ++i) {
        // a function must fit a slalom on its own
        if (!part_feasible(h, capacity, required, {i})) {
            Infeasibility inf;
            inf.index = -1;
            for (int n : required) {
                if (capacity[static_cast<std::size_t>(n)] < 1) {
                    inf.index = n;
                    break;
                }
            }
            inf.values = {h.fns[i][static_cast<std::size_t>(std::max(inf.index, 0))]};
            return inf;
        }
        bool placed = false;
        for (std::size_t j = 0; j < parts.size(); ++j) {
            auto trial = parts[j];
            trial.push_back(i);
            if (part_feasible(h, capacity, required, trial)) {
                parts[j] = std::move(trial);
                assignment[i] = static_cast<int>(j);
                placed = true;
                break;
            }
        }
        if (!placed) {
            assignment[i] = static_cast<int>(parts.size());
            parts.push_back({i});
        }
    }
    GreedyCover out;
    out.assignment = std::move(assignment);
    for (const auto& part : parts) {
        out.family.push_back(std::get<Slalom>(cover_members(h, capacity, mode, part)));
    }
    return out;
}

MinCoverResult min_cover_exact(const WindowFunctionFamily& h,
                               const std::vector<long long>& capacity, const CoverMode& mode,
                               int exhaustive_bound) {
    check_family_capacity(h, capacity);
    if (static_cast<int>(h.fns.size()) > exhaustive_bound) {
        return BoundExceeded{exhaustive_bound};
    }
    std::vector<int> required = mode.required_indices(h.length);
    for (std::size_t i = 0; i < h.fns.size(); ++i) {
        if (!part_feasible(h, capacity, required, {i})) {
            Infeasibility inf;
            inf.index = -1;
            for (int n : required) {
                std::set<int> vals{h.fns[i][static_cast<std::size_t>(n)]};
                if (static_cast<long long>(vals.size()) > capacity[static_cast<std::size_t>(n)]) {
                    inf.index = n;
                    break;
                }
            }
            inf.values = {h.fns[i][static_cast<std::size_t>(std::max(inf.index, 0))]};
            return inf;
        }
    }
    std::size_t count = h.fns.size();
    std::vector<std::vector<std::size_t>> parts;
    std::vector<int> assignment(count, -1), best_assignment;
    int best = static_cast<int>(count) + 1;

    auto rec = [&](auto&& self, std::size_t i) -> void {
        if (static_cast<int>(parts.size()) >= best) return;  // cannot improve
        if (i == count) {
            best = static_cast<int>(parts.size());
            best_assignment = assignment;
            return;
        }
        for (std::size_t j = 0; j < parts.size(); ++j) {
            parts[j].push_back(i);
            if (part_feasible(h, capacity, required, parts[j])) {
                assignment[i] = static_cast<int>(j);
                self(self, i + 1);
            }
            parts[j].pop_back();
        }
        parts.push_back({i});
        assignment[i] = static_cast<int>(parts.size()) - 1;
        self(self, i + 1);
        parts.pop_back();
        assignment[i] = -1;
    };
    if (count == 0) {
        return MinCover{0, {}, {}};
    }
    rec(rec, 0);

    MinCover out;
    out.size = best;
    out.assignment = best_assignment;
    std::vector<std::vector<std::size_t>> final_parts(static_cast<std::size_t>(best));
    for (std::size_t i = 0; i < count; ++i) {
        final_parts[static_cast<std::size_t>(best_assignment[i])].push_back(i);
    }
    for (const auto& part : final_parts) {
        out.family.push_back(std::get<Slalom>(cover_members(h, capacity, mode, part)));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Family files

FamilyFile parse_family_file(const std::string& text) {
    FamilyFile out;
    bool saw_family = false, saw_g = false;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;
        auto fail = [&](const std::string& msg) -> void {
            throw std::runtime_error("family file, line " + std::to_string(lineno) + ": " + msg);
        };
        if (tok == "#family") {
            if (saw_family) fail("duplicate #family header");
            saw_family = true;
            std::string kv;
            while (ls >> kv) {
                auto eq = kv.find('=');
                if (eq == std::string::npos) fail("expected key=value");
                std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
                if (key == "N") out.family.length = std::stoi(value);
                else if (key == "V") out.family.value_bound = std::stoi(value);
                else fail("unknown key '" + key + "'");
            }
        } else if (tok == "#g") {
            if (!saw_family) fail("#g before #family");
            if (saw_g) fail("duplicate #g line");
            saw_g = true;
            long long v;
            while (ls >> v) out.capacity.push_back(v);
            if (static_cast<int>(out.capacity.size()) != out.family.length) {
                fail("capacity length differs from N");
            }
        } else if (tok[0] == '#') {
            fail("unknown header '" + tok + "'");
        } else {
            if (!saw_family) fail("function line before #family");
            std::vector<int> fn;
            fn.push_back(std::stoi(tok));
            int v;
            while (ls >> v) fn.push_back(v);
            if (static_cast<int>(fn.size()) != out.family.length) {
                fail("function length differs from N");
            }
            out.family.fns.push_back(std::move(fn));
        }
    }
    if (!saw_family) throw std::runtime_error("family file: missing #family header");
    if (!saw_g) throw std::runtime_error("family file: missing #g capacity line");
    out.family.validate();
    return out;
}

FamilyFile load_family_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open family file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_family_file(buf.str());
}

}  // namespace efk
