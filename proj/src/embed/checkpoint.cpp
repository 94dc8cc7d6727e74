#include <cstring>
#include <fstream>
#include <sstream>

#include "duokg/embed.hpp"

namespace duokg::embed {

namespace {

constexpr const char* kMagic = "duokg-checkpoint 1";

void put_u32(std::ostream& out, std::uint32_t v) {
    const char bytes[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                           static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    out.write(bytes, 4);
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) throw IoError("checkpoint: truncated payload");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void write_floats(std::ostream& out, std::span<const double> values) {
    for (double v : values) {
        const float f = static_cast<float>(v);
        std::uint32_t bits;
        std::memcpy(&bits, &f, 4);
        put_u32(out, bits);
    }
}

std::vector<double> read_floats(std::istream& in, std::size_t count) {
    std::vector<double> out(count);
    for (auto& v : out) {
        const std::uint32_t bits = get_u32(in);
        float f;
        std::memcpy(&f, &bits, 4);
        v = static_cast<double>(f);
    }
    nn::require_finite(out, "checkpoint payload");
    return out;
}

std::string header_line(std::istream& in, std::size_t& line_no) {
    std::string line;
    if (!std::getline(in, line)) throw IoError("checkpoint: unexpected end of file");
    ++line_no;
    return line;
}

}  // namespace

void round_to_float(std::vector<double>& values) {
    for (auto& v : values) v = static_cast<double>(static_cast<float>(v));
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
    std::ostringstream out(std::ios::binary);
    out << kMagic << '\n';
    if (ckpt.table) {
        const auto& t = *ckpt.table;
        out << "transe " << t.dim << ' ' << t.num_entities << ' ' << t.num_relations << ' ' << ckpt.seed << '\n';
        write_floats(out, t.entities);
        write_floats(out, t.relations);
    }
    if (ckpt.clusters) {
        const auto& c = *ckpt.clusters;
        out << "kmeans " << c.num_clusters << ' ' << c.dim << ' ' << c.assignment.size() << '\n';
        for (auto a : c.assignment) put_u32(out, a);
        write_floats(out, c.centroids);
        write_floats(out, c.learned);
    }
    if (!ckpt.params.empty()) {
        out << "params " << ckpt.params.size() << '\n';
        std::size_t offset = 0;
        for (const auto& [name, tensor] : ckpt.params) {
            out << name << ' ' << tensor.shape.rows << ' ' << tensor.shape.cols << ' ' << offset << '\n';
            offset += tensor.values.size();
        }
        for (const auto& [name, tensor] : ckpt.params) write_floats(out, tensor.values);
    }
    out << "end\n";
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot write checkpoint " + path.string());
    const std::string bytes = out.str();
    file.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!file) throw IoError("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint " + path.string());
    Checkpoint ckpt;
    std::size_t line_no = 0;
    if (header_line(in, line_no) != kMagic) throw ParseError(path.string() + ": not a checkpoint file", 1);
    for (;;) {
        const std::string line = header_line(in, line_no);
        std::istringstream hs(line);
        std::string kind;
        hs >> kind;
        auto bad = [&](const std::string& why) {
            return ParseError(path.string() + ": line " + std::to_string(line_no) + ": " + why, line_no);
        };
        if (kind == "end") break;
        if (kind == "transe") {
            EmbeddingTable t;
            if (!(hs >> t.dim >> t.num_entities >> t.num_relations >> ckpt.seed)) throw bad("malformed transe header");
            t.entities = read_floats(in, t.num_entities * t.dim);
            t.relations = read_floats(in, t.num_relations * t.dim);
            ckpt.table = std::move(t);
        } else if (kind == "kmeans") {
            ClusterModel c;
            std::size_t n = 0;
            if (!(hs >> c.num_clusters >> c.dim >> n)) throw bad("malformed kmeans header");
            c.assignment.resize(n);
            for (auto& a : c.assignment) {
                a = get_u32(in);
                if (a >= c.num_clusters) throw bad("cluster assignment out of range");
            }
            c.centroids = read_floats(in, c.num_clusters * c.dim);
            c.learned = read_floats(in, c.num_clusters * c.dim);
            ckpt.clusters = std::move(c);
        } else if (kind == "params") {
            std::size_t count = 0;
            if (!(hs >> count)) throw bad("malformed params header");
            std::vector<std::pair<std::string, nn::Shape>> manifest;
            std::size_t expected_offset = 0;
            for (std::size_t i = 0; i < count; ++i) {
                std::istringstream ls(header_line(in, line_no));
                std::string name;
                nn::Shape shape;
                std::size_t offset = 0;
                if (!(ls >> name >> shape.rows >> shape.cols >> offset)) throw bad("malformed parameter line");
                if (offset != expected_offset) throw bad("parameter offset mismatch for " + name);
                expected_offset += shape.size();
                manifest.emplace_back(name, shape);
            }
            for (const auto& [name, shape] : manifest) {
                ckpt.params.emplace_back(name, nn::Tensor(shape, read_floats(in, shape.size())));
            }
        } else {
            throw bad("unknown block '" + kind + "'");
        }
    }
    return ckpt;
}

void load_params(const Checkpoint& ckpt, nn::ParamStore& store) {
    if (ckpt.params.size() != store.count()) {
        throw ShapeError("checkpoint holds " + std::to_string(ckpt.params.size()) + " parameters, model declares " +
                         std::to_string(store.count()));
    }
    for (const auto& [name, tensor] : ckpt.params) {
        if (!store.contains(name)) throw ShapeError("checkpoint parameter not in model: " + name);
        const nn::ParamId id = store.id(name);
        if (store.shape(id) != tensor.shape) {
            throw ShapeError(name + ": checkpoint shape " + tensor.shape.str() + " vs model shape " +
                             store.shape(id).str());
        }
        store.tensor(id).values = tensor.values;
    }
}

std::vector<std::pair<std::string, nn::Tensor>> snapshot_params(const nn::ParamStore& store) {
    std::vector<std::pair<std::string, nn::Tensor>> out;
    for (std::uint32_t i = 0; i < store.count(); ++i) {
        out.emplace_back(store.name(nn::ParamId{i}), store.tensor(nn::ParamId{i}));
    }
    return out;
}

}  // namespace duokg::embed
