#include "ecokg/chem_similarity.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

#include "ecokg/errors.hpp"

namespace ecokg {

namespace {

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

void require_same_width(const Fingerprint& a, const Fingerprint& b) {
    if (a.width() != b.width()) {
        throw std::invalid_argument("fingerprint width mismatch: " + std::to_string(a.width()) + " vs " +
                                    std::to_string(b.width()));
    }
}

}  // namespace

Fingerprint::Fingerprint(std::string compound, std::size_t width)
    : compound_(std::move(compound)), width_(width), words_((width + 63) / 64, 0) {}

Fingerprint Fingerprint::from_hex(std::string compound, std::string_view hex) {
    Fingerprint fp(std::move(compound), hex.size() * 4);
    for (std::size_t k = 0; k < hex.size(); ++k) {
        const int v = hex_value(hex[k]);
        if (v < 0) throw InputError("invalid hex digit '" + std::string(1, hex[k]) + "' in fingerprint");
        for (int b = 0; b < 4; ++b) {
            if (v & (8 >> b)) fp.set(4 * k + static_cast<std::size_t>(b));
        }
    }
    return fp;
}

std::size_t Fingerprint::count() const noexcept {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
}

bool Fingerprint::test(std::size_t bit) const {
    if (bit >= width_) throw std::out_of_range("fingerprint bit out of range");
    return (words_[bit / 64] >> (bit % 64)) & 1U;
}

void Fingerprint::set(std::size_t bit, bool value) {
    if (bit >= width_) throw std::out_of_range("fingerprint bit out of range");
    const std::uint64_t mask = std::uint64_t{1} << (bit % 64);
    if (value) {
        words_[bit / 64] |= mask;
    } else {
        words_[bit / 64] &= ~mask;
    }
}

std::string Fingerprint::to_hex() const {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve((width_ + 3) / 4);
    for (std::size_t k = 0; 4 * k < width_; ++k) {
        int v = 0;
        for (std::size_t b = 0; b < 4; ++b) {
            const auto bit = 4 * k + b;
            if (bit < width_ && test(bit)) v |= 8 >> b;
        }
        out.push_back(digits[v]);
    }
    return out;
}

std::size_t intersection_count(const Fingerprint& a, const Fingerprint& b) {
    require_same_width(a, b);
    std::size_t n = 0;
    for (std::size_t w = 0; w < a.words_.size(); ++w) n += static_cast<std::size_t>(std::popcount(a.words_[w] & b.words_[w]));
    return n;
}

std::size_t union_count(const Fingerprint& a, const Fingerprint& b) {
    require_same_width(a, b);
    std::size_t n = 0;
    for (std::size_t w = 0; w < a.words_.size(); ++w) n += static_cast<std::size_t>(std::popcount(a.words_[w] | b.words_[w]));
    return n;
}

double jaccard(const Fingerprint& a, const Fingerprint& b) {
    const auto uni = union_count(a, b);
    if (uni == 0) return 0.0;
    return static_cast<double>(intersection_count(a, b)) / static_cast<double>(uni);
}

std::vector<Fingerprint> load_fingerprints_tsv(const std::filesystem::path& path,
                                               std::optional<std::size_t> expected_width) {
    std::ifstream in(path);
    if (!in) throw InputError(path.string() + ": cannot open file");
    std::vector<Fingerprint> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty() || line.front() == '#') continue;
        const auto fields = split_tabs(line);
        if (fields.size() != 2 || trim(fields[0]).empty()) {
            throw InputError(path.string(), line_no, "expected <compound_id>\\t<hex_bitstring>");
        }
        try {
            auto fp = Fingerprint::from_hex(std::string(trim(fields[0])), trim(fields[1]));
            const auto want = expected_width ? *expected_width : (out.empty() ? fp.width() : out.front().width());
            if (fp.width() != want) {
                throw InputError("fingerprint width " + std::to_string(fp.width()) + ", expected " +
                                 std::to_string(want));
            }
            out.push_back(std::move(fp));
        } catch (const InputError& e) {
            throw InputError(path.string(), line_no, e.what());
        }
    }
    return out;
}

NeighborMatrix similarity_matrix(const std::vector<Fingerprint>& fingerprints) {
    std::vector<std::string> labels;
    labels.reserve(fingerprints.size());
    for (const auto& fp : fingerprints) labels.push_back(fp.compound());
    NeighborMatrix m(std::move(labels));
    for (std::size_t i = 0; i < fingerprints.size(); ++i) {
        m(i, i) = jaccard(fingerprints[i], fingerprints[i]);
        for (std::size_t j = i + 1; j < fingerprints.size(); ++j) {
            m(i, j) = m(j, i) = jaccard(fingerprints[i], fingerprints[j]);
        }
    }
    return m;
}

NeighborMatrix similarity_matrix(const std::vector<Fingerprint>& fingerprints,
                                 const std::vector<std::string>& compounds) {
    const std::size_t width = fingerprints.empty() ? kDefaultFingerprintWidth : fingerprints.front().width();
    std::unordered_map<std::string, const Fingerprint*> by_id;
    for (const auto& fp : fingerprints) by_id.emplace(fp.compound(), &fp);
    std::vector<Fingerprint> ordered;
    ordered.reserve(compounds.size());
    for (const auto& c : compounds) {
        if (auto it = by_id.find(c); it != by_id.end()) {
            ordered.push_back(*it->second);
        } else {
            ordered.emplace_back(c, width);
        }
    }
    return similarity_matrix(ordered);
}

std::vector<Triple> emit_similarity_triples(const NeighborMatrix& similarity, double phi, GraphStore& store) {
    if (!(phi >= 0.0 && phi <= 1.0)) throw std::invalid_argument("similarity threshold must lie in [0, 1]");
    std::vector<Triple> added;
    for (std::size_t i = 0; i < similarity.size(); ++i) {
        for (std::size_t j = i + 1; j < similarity.size(); ++j) {
            if (similarity(i, j) > phi) {
                const auto t = store.add_triple(similarity.labels()[i], kSimilarityPredicate, similarity.labels()[j]);
                added.push_back(t);
            }
        }
    }
    return added;
}

std::vector<std::size_t> order_by_nearest_similarity(const NeighborMatrix& similarity) {
    const std::size_t n = similarity.size();
    std::vector<double> nearest(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) nearest[i] = std::max(nearest[i], similarity(i, j));
        }
    }
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return nearest[a] > nearest[b]; });
    return order;
}

}  // namespace ecokg
