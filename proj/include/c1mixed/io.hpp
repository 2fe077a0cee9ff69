#pragma once

#include "c1mixed/mesh.hpp"
#include "c1mixed/space.hpp"

#include <string>

namespace c1mixed {

/// Mesh from JSON text {"vertices": [[x,y],...], "triangles": [[i,j,k],...],
/// "quads": [[i,j,k,l],...]}. Throws MeshError on schema or validity errors.
MixedMesh parse_mesh(const std::string& json_text);

/// Reads and parses a mesh file; throws Error when the file cannot be read.
MixedMesh load_mesh(const std::string& path);

std::string mesh_to_json(const MixedMesh& mesh);

/// FNV-1a 64-bit hash of the vertex coordinates and element lists, as 16
/// hex digits.
std::string mesh_hash(const MixedMesh& mesh);

/// {"degree": p, "mesh_hash": "...", "elements": [{"kind": ..., "ordinates": [...]}]}
/// Ordinates use the flat storage order of BezierPatch.
std::string export_spline(const SplineFunction& spline, const MixedMesh& mesh);

/// Inverse of export_spline; throws Error when the hash does not match mesh.
SplineFunction import_spline(const std::string& json_text, const MixedMesh& mesh);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

} // namespace c1mixed
