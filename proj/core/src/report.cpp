#include "polymax/report.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "polymax/errors.hpp"

namespace polymax {

namespace {
std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}
}  // namespace

void write_csv_header(std::ostream& os) {
    os << "instance-id,n,k,domain,SOS,OPT-or-bound,rounded,ratio,seconds,seed\n";
}

void write_csv_row(std::ostream& os, const RunRecord& r) {
    os << r.instance_id << ',' << r.n << ',' << r.k << ',' << r.domain << ',' << fmt(r.sos)
       << ',' << fmt(r.opt_or_bound) << ',' << fmt(r.rounded) << ',' << fmt(r.ratio) << ','
       << fmt(r.seconds) << ',' << r.seed << '\n';
}

std::vector<RunRecord> read_csv(std::istream& is) {
    std::vector<RunRecord> rows;
    std::string line;
    bool header = true;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        std::istringstream ls(line);
        RunRecord r;
        std::string field;
        auto next = [&]() {
            if (!std::getline(ls, field, ',')) throw ParseError("short CSV row");
            return field;
        };
        r.instance_id = next();
        r.n = std::stoi(next());
        r.k = std::stoi(next());
        r.domain = next();
        r.sos = std::stod(next());
        r.opt_or_bound = std::stod(next());
        r.rounded = std::stod(next());
        r.ratio = std::stod(next());
        r.seconds = std::stod(next());
        r.seed = std::stoull(next());
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace polymax
