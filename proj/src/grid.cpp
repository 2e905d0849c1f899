#include "eve/grid.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

namespace eve {

namespace {

Cell cell_from_json(const nlohmann::json& j, const char* field) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
        throw std::invalid_argument(std::string(field) + ": expected [x, y] integer pair");
    return Cell{j[0].get<int>(), j[1].get<int>()};
}

} // namespace

bool GridSpec::is_cliff(const Cell& c) const {
    return std::find(cliff.begin(), cliff.end(), c) != cliff.end();
}

bool GridSpec::is_wall(const Cell& c) const {
    return std::find(walls.begin(), walls.end(), c) != walls.end();
}

void GridSpec::validate() const {
    if (width <= 0) throw std::invalid_argument("width: must be positive");
    if (height <= 0) throw std::invalid_argument("height: must be positive");
    if (!in_bounds(start)) throw std::invalid_argument("start: outside the grid");
    if (is_cliff(start)) throw std::invalid_argument("start: inside a cliff cell");
    if (is_wall(start)) throw std::invalid_argument("start: inside a wall cell");
    for (const Cell& c : cliff) {
        if (!in_bounds(c)) throw std::invalid_argument("cliff: cell out of bounds");
        if (is_wall(c)) throw std::invalid_argument("cliff: cell overlaps a wall");
    }
    for (const Cell& c : walls)
        if (!in_bounds(c)) throw std::invalid_argument("walls: cell out of bounds");
}

GridSpec GridSpec::from_json(const nlohmann::json& j) {
    GridSpec spec;
    if (!j.contains("width") || !j.contains("height") || !j.contains("start"))
        throw std::invalid_argument("env: missing width, height or start");
    spec.width = j.at("width").get<int>();
    spec.height = j.at("height").get<int>();
    spec.start = cell_from_json(j.at("start"), "start");
    if (j.contains("cliff"))
        for (const auto& c : j.at("cliff")) spec.cliff.push_back(cell_from_json(c, "cliff"));
    if (j.contains("walls"))
        for (const auto& c : j.at("walls")) spec.walls.push_back(cell_from_json(c, "walls"));
    if (j.contains("cliff_as_states")) spec.cliff_as_states = j.at("cliff_as_states").get<bool>();
    spec.validate();
    return spec;
}

nlohmann::json GridSpec::to_json() const {
    nlohmann::json j;
    j["width"] = width;
    j["height"] = height;
    j["start"] = {start.x, start.y};
    auto cells = nlohmann::json::array();
    for (const Cell& c : cliff) cells.push_back({c.x, c.y});
    j["cliff"] = cells;
    cells = nlohmann::json::array();
    for (const Cell& c : walls) cells.push_back({c.x, c.y});
    j["walls"] = cells;
    if (cliff_as_states) j["cliff_as_states"] = true;
    return j;
}

GridSpec GridSpec::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("env: cannot open " + path);
    nlohmann::json j;
    in >> j;
    return from_json(j);
}

void GridSpec::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << to_json().dump(2) << "\n";
}

GridSpec GridSpec::cliffworld() {
    GridSpec spec;
    spec.width = 6;
    spec.height = 4;
    spec.start = {0, 0};
    for (int x = 1; x < spec.width; ++x) spec.cliff.push_back({x, 0});
    return spec;
}

} // namespace eve
