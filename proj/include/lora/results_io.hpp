#pragma once

#include <iosfwd>
#include <string>

#include "lora/simulator.hpp"

namespace lora {

enum class TableFormat { csv, json };

inline constexpr const char* kCsvHeader =
    "snr_db,rmse_l_cfo,rmse_lambda_cfo,rmse_l_sto,rmse_lambda_sto,ser,frames,symbols";

void write_results(const ResultTable& table, std::ostream& out, TableFormat format);
// Throws std::ios_base::failure when the file cannot be written.
void write_results(const ResultTable& table, const std::string& path, TableFormat format);

ResultTable read_results_json(const std::string& text);

}  // namespace lora
