#include <algorithm>
#include <fstream>

#include "duokg/kg.hpp"

namespace duokg::kg {

std::vector<Triple> Dataset::graph_edges() const {
    std::vector<Triple> held_out(test.begin(), test.end());
    std::sort(held_out.begin(), held_out.end());
    std::vector<Triple> out;
    out.reserve(facts.size());
    for (const auto& t : facts) {
        if (!std::binary_search(held_out.begin(), held_out.end(), t)) out.push_back(t);
    }
    return out;
}

Dataset load_dataset(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw IoError("dataset directory not found: " + dir.string());
    Dataset ds;
    const bool has_facts = fs::exists(dir / "facts.tsv");
    if (has_facts) ds.facts = load_triples(dir / "facts.tsv", ds.entities, ds.relations);
    ds.train = load_triples(dir / "train.tsv", ds.entities, ds.relations);
    if (fs::exists(dir / "valid.tsv")) ds.valid = load_triples(dir / "valid.tsv", ds.entities, ds.relations);
    ds.test = load_triples(dir / "test.tsv", ds.entities, ds.relations);
    if (!has_facts) ds.facts = ds.train;
    return ds;
}

void save_dataset(const std::filesystem::path& dir, const Dataset& ds) {
    std::filesystem::create_directories(dir);
    write_triples(dir / "facts.tsv", ds.facts, ds.entities, ds.relations);
    write_triples(dir / "train.tsv", ds.train, ds.entities, ds.relations);
    write_triples(dir / "valid.tsv", ds.valid, ds.entities, ds.relations);
    write_triples(dir / "test.tsv", ds.test, ds.entities, ds.relations);
}

}  // namespace duokg::kg
