#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "selfsim/errors.hpp"
#include "selfsim/format.hpp"
#include "selfsim/grid.hpp"

namespace selfsim {

void write_grid_function(const GridFunction& f, const std::filesystem::path& csv_path) {
    std::ofstream csv(csv_path);
    if (!csv) throw ParameterError("cannot open " + csv_path.string() + " for writing");
    csv << "y,value\n";
    const Grid& g = f.grid();
    for (std::size_t i = 0; i < f.size(); ++i) {
        csv << format_double(g.nodes[i]) << ',' << format_double(f[i]) << '\n';
    }
    nlohmann::json side = {
        {"value_at_zero", f.value_at_zero()},
        {"slope_at_zero", f.slope_at_zero()},
        {"alpha", g.alpha},
        {"y_min", g.y_min},
        {"y_max", g.y_max},
        {"n", g.size()},
    };
    std::ofstream js(csv_path.string() + ".json");
    js << side.dump(2) << '\n';
}

GridFunction read_grid_function(const std::filesystem::path& csv_path) {
    std::ifstream js(csv_path.string() + ".json");
    if (!js) throw ParameterError("missing sidecar " + csv_path.string() + ".json");
    const auto side = nlohmann::json::parse(js);
    auto grid = make_grid(side.at("alpha").get<double>(), side.at("n").get<std::size_t>(),
                          side.at("y_min").get<double>(), side.at("y_max").get<double>());

    std::ifstream csv(csv_path);
    if (!csv) throw ParameterError("cannot open " + csv_path.string());
    std::string line;
    std::getline(csv, line);
    if (line != "y,value") throw ParameterError("unexpected CSV header: " + line);
    std::vector<double> values;
    values.reserve(grid->size());
    while (std::getline(csv, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ParameterError("malformed CSV row: " + line);
        const double y = std::stod(line.substr(0, comma));
        const std::size_t i = values.size();
        if (i >= grid->size() || std::abs(y - grid->nodes[i]) > 1e-12 * grid->nodes[i]) {
            throw ParameterError("CSV nodes do not match the grid described by the sidecar");
        }
        values.push_back(std::stod(line.substr(comma + 1)));
    }
    return GridFunction(grid, std::move(values), side.at("value_at_zero").get<double>(),
                        side.at("slope_at_zero").get<double>());
}

}  // namespace selfsim
