#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace eve {

struct Cell {
    int x = 0;
    int y = 0;
    friend bool operator==(const Cell&, const Cell&) = default;
};

/// Gridworld layout: zero-based coordinates, x rightward, y upward.
/// Cliff cells reset the agent to the start; wall cells are impassable.
struct GridSpec {
    int width = 0;
    int height = 0;
    Cell start{};
    std::vector<Cell> cliff;
    std::vector<Cell> walls;
    // When true, cliff cells are kept as real states whose every action
    // jumps back to the start. Default removes them from the state space.
    bool cliff_as_states = false;

    bool in_bounds(const Cell& c) const {
        return c.x >= 0 && c.x < width && c.y >= 0 && c.y < height;
    }
    bool is_cliff(const Cell& c) const;
    bool is_wall(const Cell& c) const;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;

    static GridSpec from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    static GridSpec load(const std::string& path);
    void save(const std::string& path) const;

    /// 6x4 grid, start bottom-left, cliff along the rest of the bottom row.
    static GridSpec cliffworld();
};

} // namespace eve
