#pragma once

// Binary and text file formats. Every multi-byte field is little-endian; each
// binary file is magic(4) | header_len u32 | JSON header | payload.
//
//   PDT1 dataset   {version, n, d, num_classes, dtype:"f32", image_domain}
//                  n*d f32 row-major | n u32 labels
//   PDM1 masks     {version, n_masks, d} | n_masks*d u8 in {0,1}
//   PDW1 weights   {version, C} | C*C f32 row-major
//   PDX1 index     {version, num_classes, k, d, beta, seed,
//                   source_dataset_hash, class_sizes}
//                  per class: size u64 source ids | size*d f32
//
// Hierarchies are UTF-8 text: `child<TAB>parent` lines with the root listed
// as its own parent, then a `#leafmap` line followed by `class_id<TAB>node`.

#include <cstdint>
#include <string>

#include "pdthreat/data_model.hpp"
#include "pdthreat/unsafe_index.hpp"

namespace pdthreat {

void save_dataset(const LabeledDataset& ds, const std::string& path);
LabeledDataset load_dataset(const std::string& path);

void save_masks(const MaskSet& masks, const std::string& path);
MaskSet load_masks(const std::string& path);

void save_weights(const WeightMatrix& w, const std::string& path);
// Validates entries lie in [0,1].
WeightMatrix load_weights(const std::string& path);
// Same format, only finiteness and nonnegativity checked (raw distances).
WeightMatrix load_raw_weights(const std::string& path);

void save_index(const RepresentativeIndex& index, const std::string& path);
RepresentativeIndex load_index(const std::string& path);

void save_hierarchy(const HierarchyTree& tree, const std::string& path);
HierarchyTree load_hierarchy(const std::string& path);
std::string hierarchy_to_text(const HierarchyTree& tree);
HierarchyTree hierarchy_from_text(const std::string& text);

// Serialized bytes, as written by the save_* functions.
std::string encode_dataset(const LabeledDataset& ds);
LabeledDataset decode_dataset(const std::string& bytes);
std::string encode_index(const RepresentativeIndex& index);
RepresentativeIndex decode_index(const std::string& bytes);

// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t dataset_hash(const LabeledDataset& ds);
std::uint64_t file_hash(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view bytes);

}  // namespace pdthreat
