#include "cmasao/archive.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

#include "cmasao/errors.hpp"

namespace cmasao {

void Archive::add(const Vector& x, double y, long gen) {
    if (!std::isfinite(y))
        throw EvaluationError("archive rejects non-finite value", x);
    entries_.push_back(Entry{x, y, gen, next_index_++});
}

namespace {

std::string full_digits(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

void archive_to_csv(const Archive& archive, std::ostream& out) {
    const int n = archive.empty() ? 0 : static_cast<int>(archive[0].x.size());
    for (int i = 1; i <= n; ++i)
        out << "x_" << i << ",";
    out << "y,gen,eval_index\n";
    for (const auto& e : archive.entries()) {
        for (int i = 0; i < n; ++i)
            out << full_digits(e.x(i)) << ",";
        out << full_digits(e.y) << "," << e.gen << "," << e.eval_index << "\n";
    }
}

Archive archive_from_csv(std::istream& in) {
    Archive archive;
    std::string line;
    if (!std::getline(in, line))
        return archive;

    int n = 0;
    {
        std::stringstream header(line);
        std::string col;
        while (std::getline(header, col, ','))
            if (col.rfind("x_", 0) == 0)
                ++n;
    }

    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::stringstream row(line);
        std::string cell;
        Vector x(n);
        for (int i = 0; i < n; ++i) {
            std::getline(row, cell, ',');
            x(i) = std::strtod(cell.c_str(), nullptr);
        }
        std::getline(row, cell, ',');
        const double y = std::strtod(cell.c_str(), nullptr);
        if (!std::isfinite(y))
            throw EvaluationError("archive rejects non-finite value", x);
        std::getline(row, cell, ',');
        const long gen = std::strtol(cell.c_str(), nullptr, 10);
        std::getline(row, cell, ',');
        const long eval_index = std::strtol(cell.c_str(), nullptr, 10);
        if (!archive.entries_.empty() && eval_index <= archive.entries_.back().eval_index)
            throw DomainError("archive csv: eval_index not strictly increasing");
        archive.entries_.push_back(Archive::Entry{x, y, gen, eval_index});
        archive.next_index_ = eval_index + 1;
    }
    return archive;
}

} // namespace cmasao
