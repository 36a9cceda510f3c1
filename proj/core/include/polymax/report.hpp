#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace polymax {

// One benchmark row. Columns are fixed and documented in the README:
// instance-id,n,k,domain,SOS,OPT-or-bound,rounded,ratio,seconds,seed
struct RunRecord {
    std::string instance_id;
    int n = 0;
    int k = 0;
    std::string domain;
    double sos = 0.0;
    double opt_or_bound = 0.0;
    double rounded = 0.0;
    double ratio = 0.0;
    double seconds = 0.0;
    std::uint64_t seed = 0;
};

void write_csv_header(std::ostream& os);
void write_csv_row(std::ostream& os, const RunRecord& r);
std::vector<RunRecord> read_csv(std::istream& is);

}  // namespace polymax
