#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "tokparity/metrics.hpp"

namespace tokparity {

nlohmann::json metric_slice_json(const MetricSlice& slice, bool include_records = true);
nlohmann::json metric_result_json(const MetricResult& result, bool include_records = true);

// Full results document: verbatim config, config hash, tokenizer hash, the
// per-family metrics and per-instance records. Serialization is canonical
// (sorted keys), so identical runs produce identical bytes.
nlohmann::json results_document(const nlohmann::json& config, std::uint64_t tokenizer_hash,
                                const MetricResult& result);

// family,consistency,case_error,inject_error,instances
std::string results_csv(const MetricResult& result);

void write_text_file(const std::string& path, std::string_view text);
std::string read_text_file(const std::string& path);

}  // namespace tokparity
