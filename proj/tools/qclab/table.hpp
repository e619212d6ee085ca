#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "experiments.hpp"
#include "qcollapse/csv.hpp"

namespace qclab {

/// In-memory CSV table that becomes a named artifact.
class Table {
public:
    Table(std::string name, const std::vector<std::string>& columns) : name_(std::move(name)) {
        os_.imbue(std::locale::classic());
        writer_.header(columns);
    }

    template <typename... Ts>
    void row(const Ts&... values) {
        (writer_.field(values), ...);
        writer_.end_row();
    }
    qcollapse::CsvWriter& writer() { return writer_; }

    CsvArtifact finish() { return {name_, os_.str()}; }

private:
    std::string name_;
    std::ostringstream os_;
    qcollapse::CsvWriter writer_{os_};
};

/// Collects messages from precondition checks.
struct Problems {
    std::vector<std::string> list;
    void require(bool ok, const std::string& msg) {
        if (!ok) list.push_back(msg);
    }
};

}  // namespace qclab
