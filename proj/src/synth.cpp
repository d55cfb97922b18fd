#include "ecokg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "ecokg/chem_similarity.hpp"
#include "ecokg/errors.hpp"
#include "ecokg/io.hpp"

namespace ecokg {

namespace {

std::string numbered(const std::string& prefix, std::size_t i) {
    auto digits = std::to_string(i);
    if (digits.size() < 3) digits.insert(0, 3 - digits.size(), '0');
    return prefix + digits;
}

bool probability(double p) { return p >= 0.0 && p <= 1.0; }

// Per-entity testing intensity, normalised to mean 1.
std::vector<double> intensities(std::size_t n, double spread, std::mt19937_64& rng) {
    std::lognormal_distribution<double> draw(0.0, spread);
    std::vector<double> w(n);
    for (auto& v : w) v = spread > 0.0 ? draw(rng) : 1.0;
    const double mean = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(n);
    for (auto& v : w) v /= mean;
    return w;
}

template <class T>
const T& pick(const std::vector<T>& options, std::mt19937_64& rng) {
    return options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
}

}  // namespace

void SyntheticSpec::validate() const {
    if (n_chemical_classes < 1 || chemicals_per_class < 1 || n_species_clades < 1 || genera_per_clade < 1 ||
        species_per_clade < 1 || fingerprint_width < 1) {
        throw InputError("synthetic spec: counts must be at least 1");
    }
    if (species_per_clade < genera_per_clade) throw InputError("synthetic spec: more genera than species per clade");
    for (double p : {label_noise, positive_rate, prototype_density, bit_flip, observation_rate, excluded_record_rate}) {
        if (!probability(p)) throw InputError("synthetic spec: probabilities must lie in [0, 1]");
    }
    if (toxicity_block_probability && !probability(*toxicity_block_probability)) {
        throw InputError("synthetic spec: toxicity_block_probability must lie in [0, 1]");
    }
    if (!(coverage_spread >= 0.0)) throw InputError("synthetic spec: coverage_spread must be non-negative");
    if (!(mean_records_per_pair >= 1.0)) throw InputError("synthetic spec: mean_records_per_pair must be at least 1");
    if (!toxicity_block_probability) {
        if (label_noise >= 0.5) throw InputError("synthetic spec: label_noise must be below 0.5");
        const double p = (positive_rate - label_noise) / (1.0 - 2.0 * label_noise);
        if (p < 0.0 || p > 1.0) {
            throw InputError("synthetic spec: positive_rate is unreachable with this label_noise");
        }
    }
}

double SyntheticSpec::block_probability() const {
    if (toxicity_block_probability) return *toxicity_block_probability;
    return (positive_rate - label_noise) / (1.0 - 2.0 * label_noise);
}

SyntheticData generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
    spec.validate();
    std::mt19937_64 rng(seed);
    SyntheticData data;

    const std::string root = "taxon/root";
    std::vector<std::size_t> clade_of;
    for (std::size_t c = 0; c < spec.n_species_clades; ++c) {
        const auto clade = numbered("taxon/clade", c);
        data.taxonomy_edges.emplace_back(clade, root);
        for (std::size_t g = 0; g < spec.genera_per_clade; ++g) {
            data.taxonomy_edges.emplace_back(clade + "-genus" + std::to_string(g), clade);
        }
        for (std::size_t s = 0; s < spec.species_per_clade; ++s) {
            const auto name = numbered("taxon/sp", data.species.size());
            data.taxonomy_edges.emplace_back(name, clade + "-genus" + std::to_string(s % spec.genera_per_clade));
            data.species.push_back(name);
            clade_of.push_back(c);
        }
    }
    // ECOTOX keeps its own, partially overlapping lineage: species -> genus -> group, aligned to
    // the NCBI leaves by sameAs.
    for (std::size_t i = 0; i < data.species.size(); ++i) {
        const auto alias = numbered("ecotox:taxon/", 1000 + i);
        const auto genus = "ecotox:genus/" + std::to_string(clade_of[i]) + "-" +
                           std::to_string((i % spec.species_per_clade) % spec.genera_per_clade);
        data.mappings.emplace_back(alias, data.species[i]);
        data.triples.push_back({alias, "rdfs:subClassOf", genus});
        data.triples.push_back({data.species[i], "ncbi:division", numbered("ncbi:division/", clade_of[i])});
    }
    for (std::size_t c = 0; c < spec.n_species_clades; ++c) {
        for (std::size_t g = 0; g < spec.genera_per_clade; ++g) {
            data.triples.push_back({"ecotox:genus/" + std::to_string(c) + "-" + std::to_string(g), "ecotox:group",
                                    numbered("ecotox:group/", c)});
        }
        for (std::size_t b = c + 1; b < spec.n_species_clades; ++b) {
            data.triples.push_back({numbered("ncbi:division/", c), "owl:disjointWith", numbered("ncbi:division/", b)});
            data.triples.push_back({numbered("ecotox:group/", c), "owl:disjointWith", numbered("ecotox:group/", b)});
        }
    }

    std::bernoulli_distribution proto_bit(spec.prototype_density), flip(spec.bit_flip);
    std::vector<std::size_t> class_of;
    for (std::size_t k = 0; k < spec.n_chemical_classes; ++k) {
        Fingerprint proto("prototype", spec.fingerprint_width);
        for (std::size_t b = 0; b < spec.fingerprint_width; ++b) proto.set(b, proto_bit(rng));
        const auto cls = numbered("chemclass/", k);
        data.triples.push_back({cls, "rdfs:subClassOf", "chem:Chemical"});
        for (std::size_t i = 0; i < spec.chemicals_per_class; ++i) {
            const auto name = numbered("chem/c", data.chemicals.size());
            Fingerprint fp(name, spec.fingerprint_width);
            for (std::size_t b = 0; b < spec.fingerprint_width; ++b) fp.set(b, proto.test(b) != flip(rng));
            data.fingerprints.emplace_back(name, fp.to_hex());
            data.triples.push_back({name, "rdf:type", cls});
            data.triples.push_back({name, "pubchem:formula", "\"C" + std::to_string(2 + data.chemicals.size()) + "H" +
                                                                  std::to_string(2 * k + 4) + "O" + std::to_string(1 + i % 4) + "\""});
            data.chemicals.push_back(name);
            class_of.push_back(k);
        }
    }

    const std::size_t n_blocks = spec.n_chemical_classes * spec.n_species_clades;
    const auto n_toxic = static_cast<std::size_t>(std::lround(spec.block_probability() * static_cast<double>(n_blocks)));
    std::vector<std::size_t> order(n_blocks);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    data.toxic_blocks.assign(n_blocks, 0);
    for (std::size_t b = 0; b < n_toxic; ++b) data.toxic_blocks[order[b]] = 1;

    const auto chem_w = intensities(data.chemicals.size(), spec.coverage_spread, rng);
    const auto species_w = intensities(data.species.size(), spec.coverage_spread, rng);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::geometric_distribution<int> extra(1.0 / spec.mean_records_per_pair);
    std::bernoulli_distribution noisy(spec.label_noise), excluded(spec.excluded_record_rate);
    std::lognormal_distribution<double> concentration(1.0, 1.5);
    const std::vector<std::string> unlabelled{"BCF", "NOEC", "EC50", "LOEL"};

    std::size_t test_id = 1;
    std::size_t positives = 0, labelled = 0;
    auto add_record = [&](std::size_t c, std::size_t s, const std::string& code) {
        EffectRecord r;
        r.test_id = std::to_string(test_id++);
        r.chemical = data.chemicals[c];
        r.species = data.species[s];
        r.outcome = parse_outcome(code);
        r.concentration = std::round(concentration(rng) * 1000.0) / 1000.0;
        r.unit = "mg/L";
        data.effects.push_back(std::move(r));
    };
    for (std::size_t c = 0; c < data.chemicals.size(); ++c) {
        for (std::size_t s = 0; s < data.species.size(); ++s) {
            if (unit(rng) >= std::min(1.0, spec.observation_rate * chem_w[c] * species_w[s])) continue;
            const bool toxic = data.toxic_blocks[class_of[c] * spec.n_species_clades + clade_of[s]];
            const int records = 1 + extra(rng);
            for (int r = 0; r < records; ++r) {
                const bool label = toxic != noisy(rng);
                add_record(c, s, label ? "LC50" : "NOEL");
                positives += label;
                ++labelled;
            }
            if (excluded(rng)) add_record(c, s, pick(unlabelled, rng));
        }
    }
    if (labelled == 0) throw InputError("synthetic spec: no effect records generated");
    data.realized_positive_rate = static_cast<double>(positives) / static_cast<double>(labelled);
    return data;
}

void write_synthetic(const SyntheticData& data, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::ostringstream tax, fps, triples, maps;
    tax << "# child\tparent\n";
    for (const auto& [c, p] : data.taxonomy_edges) tax << c << '\t' << p << '\n';
    for (const auto& [c, hex] : data.fingerprints) fps << c << '\t' << hex << '\n';
    for (const auto& t : data.triples) triples << t[0] << '\t' << t[1] << '\t' << t[2] << '\n';
    for (const auto& [a, b] : data.mappings) maps << a << '\t' << b << '\n';
    write_atomic(dir / "taxonomy.tsv", tax.str());
    write_atomic(dir / "fingerprints.tsv", fps.str());
    write_atomic(dir / "triples.tsv", triples.str());
    write_atomic(dir / "mappings.tsv", maps.str());
    write_effects_csv(dir / "effects.csv", data.effects);
}

}  // namespace ecokg
