#pragma once

#include <iosfwd>
#include <vector>

#include "cmasao/cma.hpp"

namespace cmasao {

/// Append-only store of all truly evaluated (x, f(x)) pairs.
class Archive {
public:
    struct Entry {
        Vector x;
        double y = 0.0;
        long gen = 0;
        long eval_index = 0;
    };

    void add(const Vector& x, double y, long gen);

    const std::vector<Entry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const Entry& operator[](std::size_t i) const { return entries_[i]; }

private:
    friend Archive archive_from_csv(std::istream& in);

    std::vector<Entry> entries_;
    long next_index_ = 0;
};

/// CSV with header x_1,...,x_N,y,gen,eval_index; values at 17 significant
/// digits so the round trip is exact.
void archive_to_csv(const Archive& archive, std::ostream& out);
Archive archive_from_csv(std::istream& in);

} // namespace cmasao
