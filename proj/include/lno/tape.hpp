#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "lno/errors.hpp"
#include "lno/grid_field.hpp"

namespace lno {

struct Node;
using Var = std::shared_ptr<Node>;

/// One value in a recorded computation. `adjoint` pulls this node's gradient
/// back into its parents (captured by the closure) and into weight accumulators.
struct Node {
    GridField value;
    GridField grad;
    bool has_grad = false;
    std::function<void(const Node&)> adjoint;

    explicit Node(GridField v) : value(std::move(v)) {}

    /// Gradient buffer, zero-initialised on first use.
    GridField& grad_buffer() {
        if (!has_grad) {
            grad = GridField(value.channels(), value.dims(), value.dx());
            has_grad = true;
        }
        return grad;
    }
};

/// Reverse-mode tape. Operations append nodes in execution order while
/// recording; backward() replays the adjoints in reverse and consumes the tape.
/// A non-recording tape evaluates the same operations without keeping history.
class Tape {
  public:
    explicit Tape(bool recording = true) : recording_(recording) {}

    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    bool recording() const noexcept { return recording_; }
    std::size_t size() const noexcept { return nodes_.size(); }

    /// Leaf value. When recording, its gradient is available after backward().
    Var input(GridField f) {
        auto n = std::make_shared<Node>(std::move(f));
        if (recording_) nodes_.push_back(n);
        return n;
    }

    Var record(GridField value, std::function<void(const Node&)> adjoint) {
        auto n = std::make_shared<Node>(std::move(value));
        if (recording_) {
            n->adjoint = std::move(adjoint);
            nodes_.push_back(n);
        }
        return n;
    }

    /// Seeds d(loss)/d(loss) = `seed` and propagates to every reachable weight
    /// and recorded input. The loss must hold exactly one value.
    void backward(const Var& loss, double seed = 1.0) {
        if (!recording_) throw std::logic_error("backward() on a non-recording tape");
        if (consumed_) throw std::logic_error("backward() on a consumed tape");
        if (nodes_.empty()) throw std::logic_error("backward() on an empty tape");
        if (!loss || loss->value.size() != 1)
            throw ShapeError("backward() needs a scalar loss");
        loss->grad_buffer().values()[0] += seed;
        for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
            Node& n = **it;
            if (n.has_grad && n.adjoint) n.adjoint(n);
        }
        nodes_.clear();
        consumed_ = true;
    }

  private:
    bool recording_;
    bool consumed_ = false;
    std::vector<Var> nodes_;
};

} // namespace lno
