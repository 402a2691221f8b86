#include "torsionlab/simplicial.hpp"

#include <algorithm>
#include <set>

namespace torsionlab::simplicial {

namespace {

std::string simplex_str(const Simplex& s) {
    std::string out = "[";
    for (size_t i = 0; i < s.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(s[i]);
    }
    return out + "]";
}

bool strictly_increasing(const Simplex& s) {
    for (size_t i = 1; i < s.size(); ++i)
        if (s[i - 1] >= s[i]) return false;
    return !s.empty();
}

}  // namespace

const std::vector<Simplex>& SimplicialComplex::simplices(int k) const {
    static const std::vector<Simplex> none;
    if (k < 0 || k > dim()) return none;
    return by_dim[static_cast<size_t>(k)];
}

int SimplicialComplex::index_of(int k, const Simplex& s) const {
    if (k < 0 || k > dim()) return -1;
    const auto& m = index_[static_cast<size_t>(k)];
    auto it = m.find(s);
    return it == m.end() ? -1 : it->second;
}

bool SimplicialComplex::contains(const Simplex& s) const {
    return index_of(static_cast<int>(s.size()) - 1, s) >= 0;
}

std::vector<Simplex> SimplicialComplex::all_simplices() const {
    std::vector<Simplex> out;
    for (const auto& lst : by_dim) out.insert(out.end(), lst.begin(), lst.end());
    return out;
}

SimplicialComplex build_complex(const std::vector<Simplex>& simplices) {
    int maxdim = -1;
    for (const auto& s : simplices) {
        if (!strictly_increasing(s))
            throw MalformedDocument("vertex tuple not strictly increasing: " +
                                    simplex_str(s));
        maxdim = std::max(maxdim, static_cast<int>(s.size()) - 1);
    }
    SimplicialComplex k;
    if (maxdim < 0) return k;
    k.by_dim.resize(static_cast<size_t>(maxdim) + 1);
    k.index_.resize(static_cast<size_t>(maxdim) + 1);
    for (const auto& s : simplices) {
        auto& lst = k.by_dim[s.size() - 1];
        lst.push_back(s);
    }
    for (size_t d = 0; d <= static_cast<size_t>(maxdim); ++d) {
        auto& lst = k.by_dim[d];
        std::sort(lst.begin(), lst.end());
        for (size_t i = 1; i < lst.size(); ++i)
            if (lst[i] == lst[i - 1])
                throw DuplicateSimplex(simplex_str(lst[i]));
        for (size_t i = 0; i < lst.size(); ++i)
            k.index_[d][lst[i]] = static_cast<int>(i);
    }
    // closure under faces
    for (int d = 1; d <= maxdim; ++d) {
        for (const auto& s : k.by_dim[static_cast<size_t>(d)]) {
            for (size_t i = 0; i < s.size(); ++i) {
                Simplex face = s;
                face.erase(face.begin() + static_cast<long>(i));
                if (k.index_of(d - 1, face) < 0)
                    throw MissingFace("face " + simplex_str(face) +
                                      " of " + simplex_str(s) + " absent");
            }
        }
    }
    return k;
}

SimplicialComplex load_complex(const nlohmann::json& document) {
    if (!document.is_object() || !document.contains("simplices") ||
        !document["simplices"].is_object())
        throw MalformedDocument("expected object with a \"simplices\" map");
    std::vector<Simplex> all;
    for (const auto& [key, lst] : document["simplices"].items()) {
        size_t pos = 0;
        int k = -1;
        try {
            k = std::stoi(key, &pos);
        } catch (const std::exception&) {
            throw MalformedDocument("dimension key not an integer: " + key);
        }
        if (pos != key.size() || k < 0)
            throw MalformedDocument("bad dimension key: " + key);
        if (!lst.is_array())
            throw MalformedDocument("simplex list for dim " + key + " not an array");
        for (const auto& js : lst) {
            if (!js.is_array())
                throw MalformedDocument("simplex entry not an array");
            Simplex s;
            for (const auto& v : js) {
                if (!v.is_number_integer())
                    throw MalformedDocument("vertex id not an integer");
                s.push_back(v.get<int>());
            }
            if (static_cast<int>(s.size()) != k + 1)
                throw MalformedDocument("simplex " + simplex_str(s) +
                                        " listed under dim " + key);
            all.push_back(std::move(s));
        }
    }
    return build_complex(all);
}

numlin::CMatrix boundary_matrix(const SimplicialComplex& kc, int k) {
    if (k < 1 || k > kc.dim())
        throw DegreeOutOfRange("boundary degree " + std::to_string(k));
    const auto& rows = kc.simplices(k - 1);
    const auto& cols = kc.simplices(k);
    numlin::CMatrix b = numlin::CMatrix::Zero(
        static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (size_t j = 0; j < cols.size(); ++j) {
        const Simplex& s = cols[j];
        for (size_t i = 0; i < s.size(); ++i) {
            Simplex face = s;
            face.erase(face.begin() + static_cast<long>(i));
            const int ri = kc.index_of(k - 1, face);
            b(ri, static_cast<Eigen::Index>(j)) += (i % 2 == 0) ? 1.0 : -1.0;
        }
    }
    return b;
}

int euler_characteristic(const SimplicialComplex& kc) {
    int chi = 0;
    for (int k = 0; k <= kc.dim(); ++k)
        chi += (k % 2 == 0 ? 1 : -1) * kc.count(k);
    return chi;
}

bool SplitComplex::in_part1(const Simplex& s) const { return part1.contains(s); }
bool SplitComplex::in_part2(const Simplex& s) const { return part2.contains(s); }
bool SplitComplex::in_interface(const Simplex& s) const { return interface.contains(s); }

SplitComplex split_input(const SimplicialComplex& total,
                         const std::vector<Simplex>& part1_marks,
                         const std::vector<Simplex>& part2_marks) {
    auto check_and_build = [&](const std::vector<Simplex>& marks,
                               const char* name) {
        for (const auto& s : marks)
            if (!total.contains(s))
                throw NotSubcomplex(std::string(name) + " lists simplex " +
                                    simplex_str(s) + " not in the total complex");
        try {
            return build_complex(marks);
        } catch (const MissingFace& e) {
            throw NotSubcomplex(std::string(name) + " not face-closed (" +
                                e.what() + ")");
        }
    };
    SplitComplex sc;
    sc.total = total;
    sc.part1 = check_and_build(part1_marks, "part1");
    sc.part2 = check_and_build(part2_marks, "part2");

    std::set<Simplex> set1(part1_marks.begin(), part1_marks.end());
    std::set<Simplex> set2(part2_marks.begin(), part2_marks.end());
    std::vector<Simplex> inter;
    for (const auto& s : set1)
        if (set2.count(s)) inter.push_back(s);
    sc.interface = build_complex(inter);

    for (int k = 0; k <= total.dim(); ++k)
        for (const auto& s : total.simplices(k))
            if (!set1.count(s) && !set2.count(s))
                throw CoverageGap("simplex " + simplex_str(s) +
                                  " is in neither part");
    return sc;
}

SimplicialComplex make_circle(int n_edges) {
    if (n_edges < 3) throw MalformedDocument("circle needs >= 3 edges");
    std::vector<Simplex> s;
    for (int i = 0; i < n_edges; ++i) s.push_back({i});
    for (int i = 0; i + 1 < n_edges; ++i) s.push_back({i, i + 1});
    s.push_back({0, n_edges - 1});
    return build_complex(s);
}

SimplicialComplex make_interval(int n_edges) {
    if (n_edges < 1) throw MalformedDocument("interval needs >= 1 edge");
    std::vector<Simplex> s;
    for (int i = 0; i <= n_edges; ++i) s.push_back({i});
    for (int i = 0; i < n_edges; ++i) s.push_back({i, i + 1});
    return build_complex(s);
}

SimplicialComplex make_s0() { return build_complex({{0}, {1}}); }

SplitComplex make_split_circle(int n_edges, int arc1_edges) {
    if (arc1_edges < 1 || arc1_edges >= n_edges)
        throw MalformedDocument("arc size out of range");
    const SimplicialComplex total = make_circle(n_edges);
    std::vector<Simplex> p1, p2;
    for (int i = 0; i <= arc1_edges; ++i) p1.push_back({i});
    for (int i = 0; i + 1 <= arc1_edges; ++i) p1.push_back({i, i + 1});
    p2.push_back({0});
    for (int i = arc1_edges; i < n_edges; ++i) p2.push_back({i});
    for (int i = arc1_edges; i + 1 < n_edges; ++i) p2.push_back({i, i + 1});
    p2.push_back({0, n_edges - 1});
    return split_input(total, p1, p2);
}

SplitComplex make_split_interval(int n_edges, int cut_vertex) {
    if (cut_vertex <= 0 || cut_vertex >= n_edges)
        throw MalformedDocument("cut must be interior");
    const SimplicialComplex total = make_interval(n_edges);
    std::vector<Simplex> p1, p2;
    for (int i = 0; i <= cut_vertex; ++i) p1.push_back({i});
    for (int i = 0; i < cut_vertex; ++i) p1.push_back({i, i + 1});
    for (int i = cut_vertex; i <= n_edges; ++i) p2.push_back({i});
    for (int i = cut_vertex; i < n_edges; ++i) p2.push_back({i, i + 1});
    return split_input(total, p1, p2);
}

}  // namespace torsionlab::simplicial
