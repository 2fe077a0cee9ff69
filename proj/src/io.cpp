#include "c1mixed/io.hpp"

#include "c1mixed/error.hpp"

#include "json.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace c1mixed {

using nlohmann::json;

MixedMesh parse_mesh(const std::string& json_text)
{
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw MeshError(std::string("malformed mesh JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("vertices")) throw MeshError("malformed mesh: missing \"vertices\"");
    try {
        std::vector<Point> vertices;
        for (const auto& v : doc.at("vertices")) {
            if (!v.is_array() || v.size() != 2) throw MeshError("malformed mesh: vertex must be [x, y]");
            vertices.emplace_back(v[0].get<double>(), v[1].get<double>());
        }
        std::vector<std::array<int, 3>> triangles;
        std::vector<std::array<int, 4>> quads;
        if (doc.contains("triangles"))
            for (const auto& t : doc.at("triangles")) {
                if (!t.is_array() || t.size() != 3) throw MeshError("malformed mesh: triangle needs 3 indices");
                triangles.push_back({t[0].get<int>(), t[1].get<int>(), t[2].get<int>()});
            }
        if (doc.contains("quads"))
            for (const auto& q : doc.at("quads")) {
                if (!q.is_array() || q.size() != 4) throw MeshError("malformed mesh: quad needs 4 indices");
                quads.push_back({q[0].get<int>(), q[1].get<int>(), q[2].get<int>(), q[3].get<int>()});
            }
        return MixedMesh(std::move(vertices), std::move(triangles), std::move(quads));
    } catch (const json::exception& e) {
        throw MeshError(std::string("malformed mesh: ") + e.what());
    }
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file '" + path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file(const std::string& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file '" + path + "'");
    out << content;
    if (!out) throw Error("error writing file '" + path + "'");
}

MixedMesh load_mesh(const std::string& path) { return parse_mesh(read_file(path)); }

std::string mesh_to_json(const MixedMesh& mesh)
{
    json doc;
    doc["vertices"] = json::array();
    for (const auto& v : mesh.vertices()) doc["vertices"].push_back({v.x(), v.y()});
    doc["triangles"] = mesh.triangles();
    doc["quads"] = mesh.quads();
    return doc.dump() + "\n";
}

std::string mesh_hash(const MixedMesh& mesh)
{
    std::uint64_t h = 1469598103934665603ULL;
    auto feed = [&](const std::string& s) {
        for (const unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ULL;
        }
    };
    char buf[64];
    for (const auto& v : mesh.vertices()) {
        std::snprintf(buf, sizeof buf, "v%.17g,%.17g;", v.x(), v.y());
        feed(buf);
    }
    for (const auto& el : mesh.elements()) {
        feed(el.kind == ElementKind::Triangle ? "t" : "q");
        for (int k = 0; k < el.vertex_count(); ++k) feed(std::to_string(el.vertices[k]) + ",");
    }
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string export_spline(const SplineFunction& spline, const MixedMesh& mesh)
{
    json doc;
    doc["degree"] = spline.degree;
    doc["mesh_hash"] = mesh_hash(mesh);
    doc["elements"] = json::array();
    for (const auto& patch : spline.patches) {
        json el;
        el["kind"] = to_string(patch.kind());
        el["ordinates"] = std::vector<double>(patch.ordinates().data(), patch.ordinates().data() + patch.size());
        doc["elements"].push_back(el);
    }
    return doc.dump() + "\n";
}

SplineFunction import_spline(const std::string& json_text, const MixedMesh& mesh)
{
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw Error(std::string("malformed spline JSON: ") + e.what());
    }
    try {
        if (doc.at("mesh_hash").get<std::string>() != mesh_hash(mesh))
            throw Error("spline was exported for a different mesh (hash mismatch)");
        SplineFunction f;
        f.degree = doc.at("degree").get<int>();
        const auto& els = doc.at("elements");
        if (els.size() != mesh.elements().size()) throw Error("spline element count does not match mesh");
        for (std::size_t i = 0; i < els.size(); ++i) {
            const auto kind = mesh.elements()[i].kind;
            if (els[i].at("kind").get<std::string>() != to_string(kind)) throw Error("spline element kind mismatch");
            const auto ord = els[i].at("ordinates").get<std::vector<double>>();
            f.patches.emplace_back(kind, f.degree, Eigen::Map<const Eigen::VectorXd>(ord.data(), ord.size()));
        }
        return f;
    } catch (const json::exception& e) {
        throw Error(std::string("malformed spline JSON: ") + e.what());
    }
}

} // namespace c1mixed
