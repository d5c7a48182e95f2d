#include "lora/results_io.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace lora {

namespace {

void write_csv(const ResultTable& table, std::ostream& out) {
    out << kCsvHeader << '\n';
    std::ostringstream line;
    line.imbue(std::locale::classic());
    line << std::setprecision(10);
    for (const auto& r : table) {
        line.str("");
        line << r.snr_db << ',' << r.rmse_l_cfo << ',' << r.rmse_lambda_cfo << ',' << r.rmse_l_sto
             << ',' << r.rmse_lambda_sto << ',' << r.ser << ',' << r.frames << ',' << r.symbols;
        out << line.str() << '\n';
    }
}

nlohmann::json to_json(const ResultTable& table) {
    auto arr = nlohmann::json::array();
    for (const auto& r : table) {
        arr.push_back({{"snr_db", r.snr_db},
                       {"rmse_l_cfo", r.rmse_l_cfo},
                       {"rmse_lambda_cfo", r.rmse_lambda_cfo},
                       {"rmse_l_sto", r.rmse_l_sto},
                       {"rmse_lambda_sto", r.rmse_lambda_sto},
                       {"ser", r.ser},
                       {"frames", r.frames},
                       {"symbols", r.symbols}});
    }
    return arr;
}

}  // namespace

void write_results(const ResultTable& table, std::ostream& out, TableFormat format) {
    if (format == TableFormat::csv)
        write_csv(table, out);
    else
        out << to_json(table).dump(2) << '\n';
}

void write_results(const ResultTable& table, const std::string& path, TableFormat format) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::ios_base::failure("cannot open " + path + " for writing");
    write_results(table, f, format);
    f.flush();
    if (!f) throw std::ios_base::failure("write failed: " + path);
}

ResultTable read_results_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    ResultTable t;
    for (const auto& o : j) {
        ResultRow r;
        r.snr_db = o.at("snr_db").get<double>();
        r.rmse_l_cfo = o.at("rmse_l_cfo").get<double>();
        r.rmse_lambda_cfo = o.at("rmse_lambda_cfo").get<double>();
        r.rmse_l_sto = o.at("rmse_l_sto").get<double>();
        r.rmse_lambda_sto = o.at("rmse_lambda_sto").get<double>();
        r.ser = o.at("ser").get<double>();
        r.frames = o.at("frames").get<long long>();
        r.symbols = o.at("symbols").get<long long>();
        t.push_back(r);
    }
    return t;
}

}  // namespace lora
