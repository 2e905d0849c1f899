#include "eve/mdp.hpp"

#include <cstdint>
#include <queue>

namespace eve {

void TabularMDP::validate() const {
    if (n_states <= 0 || n_actions <= 0)
        throw std::invalid_argument("TabularMDP: state/action counts must be positive");
    if (static_cast<int>(next_state.size()) != n_sa())
        throw std::invalid_argument("TabularMDP: next_state table has wrong size");
    for (int s : next_state)
        if (s < 0 || s >= n_states)
            throw std::invalid_argument("TabularMDP: successor out of range");
    if (initial_state < 0 || initial_state >= n_states)
        throw std::invalid_argument("TabularMDP: initial state out of range");
}

Policy Policy::uniform(int n_states, int n_actions) {
    Policy p;
    p.probs = Eigen::MatrixXd::Constant(n_states, n_actions, 1.0 / n_actions);
    return p;
}

void Policy::validate() const {
    for (int s = 0; s < n_states(); ++s) {
        if ((probs.row(s).array() < 0.0).any())
            throw std::invalid_argument("Policy: negative probability");
        if (std::abs(probs.row(s).sum() - 1.0) > 1e-12)
            throw std::invalid_argument("Policy: row does not sum to 1");
    }
}

namespace {

// Strong connectivity of the state graph s -> next(s, a): forward and
// reverse reachability from state 0.
bool strongly_connected(const TabularMDP& mdp) {
    const int n = mdp.n_states;
    std::vector<std::vector<int>> fwd(n), rev(n);
    for (int s = 0; s < n; ++s)
        for (int a = 0; a < mdp.n_actions; ++a) {
            int t = mdp.next(s, a);
            fwd[s].push_back(t);
            rev[t].push_back(s);
        }
    auto reach_all = [n](const std::vector<std::vector<int>>& adj) {
        std::vector<char> seen(n, 0);
        std::queue<int> q;
        q.push(0);
        seen[0] = 1;
        int count = 1;
        while (!q.empty()) {
            int s = q.front();
            q.pop();
            for (int t : adj[s])
                if (!seen[t]) {
                    seen[t] = 1;
                    ++count;
                    q.push(t);
                }
        }
        return count == n;
    };
    return reach_all(fwd) && reach_all(rev);
}

} // namespace

TabularMDP build_gridworld(const GridSpec& spec, std::vector<Cell>* state_cells) {
    spec.validate();

    std::vector<Cell> cells;
    std::vector<int> cell_state(spec.width * spec.height, -1);
    for (int y = 0; y < spec.height; ++y)
        for (int x = 0; x < spec.width; ++x) {
            Cell c{x, y};
            if (spec.is_wall(c)) continue;
            if (spec.is_cliff(c) && !spec.cliff_as_states) continue;
            cell_state[y * spec.width + x] = static_cast<int>(cells.size());
            cells.push_back(c);
        }

    TabularMDP mdp;
    mdp.n_states = static_cast<int>(cells.size());
    mdp.n_actions = kGridActions;
    mdp.next_state.assign(mdp.n_sa(), 0);
    mdp.initial_state = cell_state[spec.start.y * spec.width + spec.start.x];

    static constexpr int dx[kGridActions] = {0, 0, -1, 1}; // up, down, left, right
    static constexpr int dy[kGridActions] = {1, -1, 0, 0};

    for (int i = 0; i < mdp.n_states; ++i) {
        const Cell& c = cells[i];
        for (int a = 0; a < kGridActions; ++a) {
            int target = i;
            if (spec.cliff_as_states && spec.is_cliff(c)) {
                target = mdp.initial_state; // any action from the cliff resets
            } else {
                Cell d{c.x + dx[a], c.y + dy[a]};
                if (!spec.in_bounds(d) || spec.is_wall(d)) {
                    target = i; // stay in place
                } else if (spec.is_cliff(d) && !spec.cliff_as_states) {
                    target = mdp.initial_state;
                } else {
                    target = cell_state[d.y * spec.width + d.x];
                }
            }
            mdp.next_state[mdp.flat(i, a)] = target;
        }
    }

    if (!strongly_connected(mdp))
        throw std::invalid_argument("grid: state graph is not strongly connected");

    if (state_cells) *state_cells = std::move(cells);
    return mdp;
}

SAOperator sa_operator(const TabularMDP& mdp, const Policy& pi0) {
    if (pi0.n_states() != mdp.n_states || pi0.n_actions() != mdp.n_actions)
        throw std::invalid_argument("sa_operator: policy dimensions do not match the MDP");
    const int n = mdp.n_sa();
    SAOperator op;
    op.n_states = mdp.n_states;
    op.n_actions = mdp.n_actions;
    op.matrix = Eigen::MatrixXd::Zero(n, n);
    for (int s = 0; s < mdp.n_states; ++s)
        for (int a = 0; a < mdp.n_actions; ++a) {
            const int src = op.flat(s, a);
            const int sp = mdp.next(s, a);
            for (int ap = 0; ap < mdp.n_actions; ++ap)
                op.matrix(op.flat(sp, ap), src) = pi0.probs(sp, ap);
        }
    return op;
}

int index_of_primitivity(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("index_of_primitivity: matrix not square");
    if ((m.array() < 0.0).any())
        throw std::invalid_argument("index_of_primitivity: negative entry");
    const int n = static_cast<int>(m.rows());
    const int words = (n + 63) / 64;
    // Bitset rows of the boolean support; row i holds the set {j : B_ij > 0}.
    auto support = [&](const Eigen::MatrixXd& x) {
        std::vector<uint64_t> rows(static_cast<size_t>(n) * words, 0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (x(i, j) > 0.0) rows[i * words + j / 64] |= uint64_t(1) << (j % 64);
        return rows;
    };
    const std::vector<uint64_t> base = support(m);
    std::vector<uint64_t> cur = base;
    std::vector<uint64_t> next(cur.size());

    auto all_positive = [&](const std::vector<uint64_t>& rows) {
        for (int i = 0; i < n; ++i) {
            for (int w = 0; w < words; ++w) {
                uint64_t want = (w == words - 1 && n % 64) ? ((uint64_t(1) << (n % 64)) - 1)
                                                          : ~uint64_t(0);
                if ((rows[i * words + w] & want) != want) return false;
            }
        }
        return true;
    };

    const long bound = static_cast<long>(n - 1) * (n - 1) + 1; // Wielandt
    for (long p = 1; p <= bound; ++p) {
        if (all_positive(cur)) return static_cast<int>(p);
        // next = base * cur (boolean product)
        std::fill(next.begin(), next.end(), 0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (base[i * words + j / 64] & (uint64_t(1) << (j % 64)))
                    for (int w = 0; w < words; ++w) next[i * words + w] |= cur[j * words + w];
        cur.swap(next);
    }
    throw ImprimitiveError("imprimitive: support never fills within the Wielandt bound");
}

bool support_equal(const Policy& a, const Policy& b) {
    if (a.probs.rows() != b.probs.rows() || a.probs.cols() != b.probs.cols())
        throw std::invalid_argument("support_equal: shape mismatch");
    return ((a.probs.array() > 0.0) == (b.probs.array() > 0.0)).all();
}

} // namespace eve
