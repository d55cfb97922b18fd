#include "ecokg/kge.hpp"

#include <fftw3.h>

#include <bit>
#include <cmath>
#include <complex>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <random>
#include <stdexcept>

#include "ecokg/errors.hpp"

namespace ecokg {

namespace {

constexpr std::size_t kFftCutover = 16;

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

void require_same_dim(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("vector dimension mismatch");
}

// FFTW planning is not thread-safe; execution on per-thread buffers is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

class FftWorkspace {
public:
    explicit FftWorkspace(std::size_t n) : n_(n), bins_(n / 2 + 1) {
        real_ = fftw_alloc_real(n_);
        spec_ = fftw_alloc_complex(bins_);
        std::lock_guard lock(planner_mutex());
        forward_ = fftw_plan_dft_r2c_1d(static_cast<int>(n_), real_, spec_, FFTW_ESTIMATE);
        inverse_ = fftw_plan_dft_c2r_1d(static_cast<int>(n_), spec_, real_, FFTW_ESTIMATE);
    }
    FftWorkspace(const FftWorkspace&) = delete;
    FftWorkspace& operator=(const FftWorkspace&) = delete;
    ~FftWorkspace() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(inverse_);
        fftw_free(real_);
        fftw_free(spec_);
    }

    std::vector<std::complex<double>> forward(std::span<const double> x) {
        std::copy(x.begin(), x.end(), real_);
        fftw_execute(forward_);
        std::vector<std::complex<double>> out(bins_);
        for (std::size_t k = 0; k < bins_; ++k) out[k] = {spec_[k][0], spec_[k][1]};
        return out;
    }

    std::vector<double> inverse(const std::vector<std::complex<double>>& spectrum) {
        for (std::size_t k = 0; k < bins_; ++k) {
            spec_[k][0] = spectrum[k].real();
            spec_[k][1] = spectrum[k].imag();
        }
        fftw_execute(inverse_);
        std::vector<double> out(n_);
        const double scale = 1.0 / static_cast<double>(n_);
        for (std::size_t i = 0; i < n_; ++i) out[i] = real_[i] * scale;
        return out;
    }

private:
    std::size_t n_;
    std::size_t bins_;
    double* real_ = nullptr;
    fftw_complex* spec_ = nullptr;
    fftw_plan forward_ = nullptr;
    fftw_plan inverse_ = nullptr;
};

FftWorkspace& workspace(std::size_t n) {
    thread_local std::map<std::size_t, std::unique_ptr<FftWorkspace>> cache;
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<FftWorkspace>(n);
    return *slot;
}

using Spectrum = std::vector<std::complex<double>>;

Spectrum correlate_spectra(const Spectrum& a, const Spectrum& b) {
    Spectrum out(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) out[k] = std::conj(a[k]) * b[k];
    return out;
}

Spectrum convolve_spectra(const Spectrum& a, const Spectrum& b) {
    Spectrum out(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] * b[k];
    return out;
}

// s corr o, p corr o and p conv s: the HolE score term and its subject/object gradients.
struct HoleTerms {
    std::vector<double> s_corr_o;
    std::vector<double> p_corr_o;
    std::vector<double> p_conv_s;
};

HoleTerms hole_terms(std::span<const double> s, std::span<const double> p, std::span<const double> o) {
    if (s.size() < kFftCutover) {
        return {circ_correlation_direct(s, o), circ_correlation_direct(p, o), circ_convolution_direct(p, s)};
    }
    auto& ws = workspace(s.size());
    const auto fs = ws.forward(s);
    const auto fp = ws.forward(p);
    const auto fo = ws.forward(o);
    return {ws.inverse(correlate_spectra(fs, fo)), ws.inverse(correlate_spectra(fp, fo)),
            ws.inverse(convolve_spectra(fp, fs))};
}

void check_triple(const EmbeddingTable& table, const Triple& t) {
    if (t.subject.index >= table.entity_count() || t.object.index >= table.entity_count() ||
        t.predicate.index >= table.relation_count()) {
        throw std::out_of_range("triple id outside the embedding table");
    }
}

}  // namespace

std::string_view to_string(ScoreKind kind) {
    switch (kind) {
        case ScoreKind::transe:
            return "transe";
        case ScoreKind::distmult:
            return "distmult";
        case ScoreKind::hole:
            return "hole";
    }
    return "?";
}

EmbeddingTable::EmbeddingTable(std::size_t entities, std::size_t relations, std::size_t dim)
    : entities_(entities), relations_(relations), dim_(dim), values_((entities + relations) * dim, 0.0) {}

std::span<double> EmbeddingTable::entity(std::size_t e) {
    if (e >= entities_) throw std::out_of_range("entity row out of range");
    return {values_.data() + e * dim_, dim_};
}

std::span<const double> EmbeddingTable::entity(std::size_t e) const {
    if (e >= entities_) throw std::out_of_range("entity row out of range");
    return {values_.data() + e * dim_, dim_};
}

std::span<double> EmbeddingTable::relation(std::size_t r) {
    if (r >= relations_) throw std::out_of_range("relation row out of range");
    return {values_.data() + (entities_ + r) * dim_, dim_};
}

std::span<const double> EmbeddingTable::relation(std::size_t r) const {
    if (r >= relations_) throw std::out_of_range("relation row out of range");
    return {values_.data() + (entities_ + r) * dim_, dim_};
}

EmbeddingTable init_embeddings(std::size_t entities, std::size_t relations, std::size_t dim, std::uint64_t seed) {
    if (dim == 0) throw std::invalid_argument("embedding dimension must be positive");
    if (entities == 0 || relations == 0) throw std::invalid_argument("embedding table needs at least one row of each kind");
    EmbeddingTable table(entities, relations, dim);
    const double bound = 6.0 / std::sqrt(static_cast<double>(dim));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-bound, bound);
    for (auto& v : table.values()) v = unif(rng);
    return table;
}

std::vector<double> circ_correlation_direct(std::span<const double> a, std::span<const double> b) {
    require_same_dim(a, b);
    const std::size_t d = a.size();
    std::vector<double> c(d, 0.0);
    for (std::size_t k = 0; k < d; ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i < d; ++i) acc += a[i] * b[(i + k) % d];
        c[k] = acc;
    }
    return c;
}

std::vector<double> circ_convolution_direct(std::span<const double> a, std::span<const double> b) {
    require_same_dim(a, b);
    const std::size_t d = a.size();
    std::vector<double> c(d, 0.0);
    for (std::size_t k = 0; k < d; ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i < d; ++i) acc += a[i] * b[(k + d - i) % d];
        c[k] = acc;
    }
    return c;
}

std::vector<double> circ_correlation(std::span<const double> a, std::span<const double> b) {
    require_same_dim(a, b);
    if (a.size() < kFftCutover) return circ_correlation_direct(a, b);
    auto& ws = workspace(a.size());
    const auto fa = ws.forward(a);
    return ws.inverse(correlate_spectra(fa, ws.forward(b)));
}

std::vector<double> circ_convolution(std::span<const double> a, std::span<const double> b) {
    require_same_dim(a, b);
    if (a.size() < kFftCutover) return circ_convolution_direct(a, b);
    auto& ws = workspace(a.size());
    const auto fa = ws.forward(a);
    return ws.inverse(convolve_spectra(fa, ws.forward(b)));
}

double score(ScoreKind kind, std::span<const double> s, std::span<const double> p, std::span<const double> o) {
    require_same_dim(s, p);
    require_same_dim(s, o);
    switch (kind) {
        case ScoreKind::distmult: {
            double z = 0.0;
            for (std::size_t d = 0; d < s.size(); ++d) z += s[d] * p[d] * o[d];
            return sigmoid(z);
        }
        case ScoreKind::hole: {
            const auto corr = circ_correlation(s, o);
            double z = 0.0;
            for (std::size_t d = 0; d < s.size(); ++d) z += p[d] * corr[d];
            return sigmoid(z);
        }
        case ScoreKind::transe: {
            double sq = 0.0;
            for (std::size_t d = 0; d < s.size(); ++d) {
                const double v = s[d] + p[d] - o[d];
                sq += v * v;
            }
            const double norm = std::sqrt(sq);
            if (norm < kTransENormFloor) return 1.0;
            return std::tanh(1.0 / norm);
        }
    }
    throw std::invalid_argument("unknown score kind");
}

double score(ScoreKind kind, const EmbeddingTable& table, const Triple& t) {
    check_triple(table, t);
    return score(kind, table.entity(t.subject.index), table.relation(t.predicate.index), table.entity(t.object.index));
}

ScoreGradients score_gradients(ScoreKind kind, std::span<const double> s, std::span<const double> p,
                               std::span<const double> o) {
    require_same_dim(s, p);
    require_same_dim(s, o);
    const std::size_t dim = s.size();
    ScoreGradients g;
    g.subject.assign(dim, 0.0);
    g.predicate.assign(dim, 0.0);
    g.object.assign(dim, 0.0);
    switch (kind) {
        case ScoreKind::distmult: {
            double z = 0.0;
            for (std::size_t d = 0; d < dim; ++d) z += s[d] * p[d] * o[d];
            g.score = sigmoid(z);
            const double dz = g.score * (1.0 - g.score);
            for (std::size_t d = 0; d < dim; ++d) {
                g.subject[d] = dz * p[d] * o[d];
                g.predicate[d] = dz * s[d] * o[d];
                g.object[d] = dz * s[d] * p[d];
            }
            return g;
        }
        case ScoreKind::hole: {
            const auto terms = hole_terms(s, p, o);
            double z = 0.0;
            for (std::size_t d = 0; d < dim; ++d) z += p[d] * terms.s_corr_o[d];
            g.score = sigmoid(z);
            const double dz = g.score * (1.0 - g.score);
            for (std::size_t d = 0; d < dim; ++d) {
                g.subject[d] = dz * terms.p_corr_o[d];
                g.predicate[d] = dz * terms.s_corr_o[d];
                g.object[d] = dz * terms.p_conv_s[d];
            }
            return g;
        }
        case ScoreKind::transe: {
            std::vector<double> v(dim);
            double sq = 0.0;
            for (std::size_t d = 0; d < dim; ++d) {
                v[d] = s[d] + p[d] - o[d];
                sq += v[d] * v[d];
            }
            const double norm = std::sqrt(sq);
            if (norm < kTransENormFloor) {
                g.score = 1.0;
                return g;
            }
            g.score = std::tanh(1.0 / norm);
            // d tanh(1/n)/dn = -(1 - tanh^2) / n^2, dn/dv = v / n.
            const double dn = -(1.0 - g.score * g.score) / (norm * norm);
            for (std::size_t d = 0; d < dim; ++d) {
                const double gv = dn * v[d] / norm;
                g.subject[d] = gv;
                g.predicate[d] = gv;
                g.object[d] = -gv;
            }
            return g;
        }
    }
    throw std::invalid_argument("unknown score kind");
}

ScoreGradients score_gradients(ScoreKind kind, const EmbeddingTable& table, const Triple& t) {
    check_triple(table, t);
    return score_gradients(kind, table.entity(t.subject.index), table.relation(t.predicate.index),
                           table.entity(t.object.index));
}

void write_u64(std::ostream& out, std::uint64_t v) {
    char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    out.write(bytes, 8);
}

void write_f64(std::ostream& out, double v) { write_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t read_u64(std::istream& in) {
    unsigned char bytes[8];
    if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw InputError("truncated checkpoint");
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | bytes[i];
    return v;
}

double read_f64(std::istream& in) { return std::bit_cast<double>(read_u64(in)); }

void write_embeddings(std::ostream& out, const EmbeddingTable& table) {
    out.write("KGE1", 4);
    write_u64(out, table.dim());
    write_u64(out, table.entity_count());
    write_u64(out, table.relation_count());
    for (double v : table.values()) write_f64(out, v);
}

EmbeddingTable read_embeddings(std::istream& in) {
    char magic[4];
    if (!in.read(magic, 4) || std::string_view(magic, 4) != "KGE1") throw InputError("not an embedding checkpoint (bad magic)");
    const auto dim = read_u64(in);
    const auto entities = read_u64(in);
    const auto relations = read_u64(in);
    constexpr std::uint64_t limit = std::uint64_t{1} << 32;
    if (dim == 0 || dim > limit || entities > limit || relations > limit) throw InputError("corrupt embedding checkpoint header");
    EmbeddingTable table(entities, relations, dim);
    for (auto& v : table.values()) v = read_f64(in);
    return table;
}

}  // namespace ecokg
