#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "simglyph/dsvm.hpp"
#include "simglyph/features.hpp"
#include "simglyph/mil.hpp"
#include "simglyph/pipeline.hpp"

namespace simglyph::serialize {

// All artifacts are versioned text files: a magic+version first line, header
// key/value lines, then payload rows. Floats are written with 9 significant
// digits, so parse(text) -> text is a fixed point after one round trip.

std::string codebook_text(const features::Codebook& cb);
features::Codebook parse_codebook(const std::string& text);
uint64_t codebook_hash(const features::Codebook& cb);

std::string model_text(const dsvm::SvmModel& m);
dsvm::SvmModel parse_model(const std::string& text);

std::string gate_text(const pipeline::ConfidenceGate& g);
pipeline::ConfidenceGate parse_gate(const std::string& text);

std::string table_text(const pipeline::SimilarPairTable& t);
pipeline::SimilarPairTable parse_table(const std::string& text);

std::string baseline_text(const pipeline::NearestCentroidBaseline& b);
pipeline::NearestCentroidBaseline parse_baseline(const std::string& text);

std::string ensemble_text(const mil::AdaBoostEnsemble& e);
mil::AdaBoostEnsemble parse_ensemble(const std::string& text);

// Convenience wrappers: atomic write / read+parse.
void save_text(const std::filesystem::path& path, const std::string& text);

features::Codebook load_codebook(const std::filesystem::path& path);
dsvm::SvmModel load_model(const std::filesystem::path& path);
pipeline::ConfidenceGate load_gate(const std::filesystem::path& path);
pipeline::SimilarPairTable load_table(const std::filesystem::path& path);
pipeline::NearestCentroidBaseline load_baseline(const std::filesystem::path& path);
mil::AdaBoostEnsemble load_ensemble(const std::filesystem::path& path);

}  // namespace simglyph::serialize
