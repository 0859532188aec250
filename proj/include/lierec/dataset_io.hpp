#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lierec/mlp.hpp"
#include "lierec/preprocessing.hpp"
#include "lierec/trajectory.hpp"

namespace lierec {

inline constexpr int kFormatVersion = 1;

/// First line of a .ljd file. Keys: format_version, group, dt, steps, bound_a, noise_sigma, seed, count.
struct DatasetHeader
{
  GroupKind group{GroupKind::SE2};
  double dt{0.1};
  std::size_t steps{20};
  double bound_a{1.0};
  double noise_sigma{0.0};
  std::uint64_t seed{1};
  std::size_t count{0};
};

/**
 * @brief Contents of a line-delimited trajectory dataset (.ljd).
 *
 * Line 1 is the header object; each following line is one record
 *   {"xi": [...], "poses": [[row-major], ...], "increments": [[...], ...]}
 * Numbers are written as the shortest decimal that round-trips binary64.
 */
struct DatasetFile
{
  DatasetHeader header;
  std::vector<Trajectory> trajectories;
  /// Increments as stored in the file; filled by read_dataset, recomputed by write_dataset.
  std::vector<IncrementSequence> increments;
};

DatasetHeader header_for(const SamplingConfig & config, std::size_t count);

/// Throws DimensionError for records that disagree with the header, Error on I/O failure.
void write_dataset(const std::filesystem::path & path, const DatasetHeader & header,
  const std::vector<Trajectory> & trajs);

std::string serialize_dataset(const DatasetHeader & header, const std::vector<Trajectory> & trajs);

/// Throws FormatError (schema, version, line number) or DomainError (pose invariants).
DatasetFile read_dataset(const std::filesystem::path & path);

DatasetFile parse_dataset(const std::string & text);

/// Single-object JSON checkpoint (.lem).
void write_model(const std::filesystem::path & path, const EncoderModel & model);
std::string serialize_model(const EncoderModel & model);

/// Throws FormatError for missing fields or version mismatch, DimensionError for shape errors.
EncoderModel read_model(const std::filesystem::path & path);
EncoderModel parse_model(const std::string & text);

/// Whole-file helpers shared by the CLI.
std::string read_text_file(const std::filesystem::path & path);
void write_text_file(const std::filesystem::path & path, const std::string & text);

}  // namespace lierec
