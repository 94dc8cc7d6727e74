#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "duokg/kg.hpp"

namespace duokg::kg {

std::uint32_t Vocabulary::intern(std::string_view name) {
    std::string key(name);
    if (auto it = index_.find(key); it != index_.end()) return it->second;
    const auto index = static_cast<std::uint32_t>(names_.size());
    names_.push_back(key);
    index_.emplace(std::move(key), index);
    return index;
}

std::optional<std::uint32_t> Vocabulary::find(std::string_view name) const {
    if (auto it = index_.find(std::string(name)); it != index_.end()) return it->second;
    return std::nullopt;
}

void Vocabulary::write(std::ostream& out) const {
    for (std::size_t i = 0; i < names_.size(); ++i) out << names_[i] << '\t' << i << '\n';
}

Vocabulary Vocabulary::read(std::istream& in) {
    Vocabulary vocab;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto tab = line.rfind('\t');
        if (tab == std::string::npos) {
            throw ParseError("vocabulary line " + std::to_string(line_no) + ": expected name<TAB>index",
                             line_no);
        }
        const std::string name = line.substr(0, tab);
        std::size_t index = 0;
        try {
            index = std::stoul(line.substr(tab + 1));
        } catch (const std::exception&) {
            throw ParseError("vocabulary line " + std::to_string(line_no) + ": bad index", line_no);
        }
        if (index != vocab.size() || vocab.find(name)) {
            throw ParseError("vocabulary line " + std::to_string(line_no) + ": indices must be dense and unique",
                             line_no);
        }
        vocab.intern(name);
    }
    return vocab;
}

std::vector<Triple> parse_triples(std::istream& in, Vocabulary& entities, Vocabulary& relations) {
    std::vector<Triple> triples;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::string_view view(line);
        const auto t1 = view.find('\t');
        const auto t2 = t1 == std::string_view::npos ? t1 : view.find('\t', t1 + 1);
        if (t1 == std::string_view::npos || t2 == std::string_view::npos ||
            view.find('\t', t2 + 1) != std::string_view::npos) {
            throw ParseError("line " + std::to_string(line_no) + ": expected 3 tab-separated fields", line_no);
        }
        const auto head = view.substr(0, t1);
        const auto rel = view.substr(t1 + 1, t2 - t1 - 1);
        const auto tail = view.substr(t2 + 1);
        if (head.empty() || rel.empty() || tail.empty()) {
            throw ParseError("line " + std::to_string(line_no) + ": empty field", line_no);
        }
        const auto h = entities.intern(head);
        const auto r = relations.intern(rel);
        const auto t = entities.intern(tail);
        triples.push_back(Triple{EntityId(h), RelationId(r), EntityId(t)});
    }
    return triples;
}

std::vector<Triple> load_triples(const std::filesystem::path& path, Vocabulary& entities,
                                 Vocabulary& relations) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    try {
        return parse_triples(in, entities, relations);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what(), e.line());
    }
}

TripleFile load_triples(const std::filesystem::path& path) {
    TripleFile file;
    file.triples = load_triples(path, file.entities, file.relations);
    return file;
}

void write_triples(const std::filesystem::path& path, std::span<const Triple> triples,
                   const Vocabulary& entities, const Vocabulary& relations) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    for (const auto& t : triples) {
        out << entities.name(t.head.value) << '\t' << relations.name(t.relation.value) << '\t'
            << entities.name(t.tail.value) << '\n';
    }
}

}  // namespace duokg::kg
