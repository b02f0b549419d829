#include "foldlab/csvio.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "foldlab/common.hpp"

namespace foldlab {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
    if (header_.empty()) throw DomainError("csv: empty header");
    for (const std::string& h : header_) {
        if (h.find_first_of(",\n\"") != std::string::npos) {
            throw DomainError("csv: separator character in header cell '" + h + "'");
        }
    }
}

CsvTable& CsvTable::raw(std::string text) {
    if (row_cells_ >= header_.size()) {
        throw DomainError("csv: row wider than header (" + header_[0] + " table)");
    }
    if (row_cells_ > 0) body_ += ',';
    body_ += text;
    ++row_cells_;
    return *this;
}

CsvTable& CsvTable::cell(double v) { return raw(g17(v)); }
CsvTable& CsvTable::cell(int v) { return raw(std::to_string(v)); }
CsvTable& CsvTable::cell(long v) { return raw(std::to_string(v)); }
CsvTable& CsvTable::cell(std::size_t v) { return raw(std::to_string(v)); }
CsvTable& CsvTable::cell(bool v) { return raw(v ? "1" : "0"); }

CsvTable& CsvTable::cell(const std::string& s) {
    if (s.find_first_of(",\n\"") != std::string::npos) {
        throw DomainError("csv: separator character in cell '" + s + "'");
    }
    return raw(s);
}

CsvTable& CsvTable::cell(const char* s) { return cell(std::string(s)); }

void CsvTable::end_row() {
    if (row_cells_ != header_.size()) {
        throw DomainError("csv: row arity " + std::to_string(row_cells_) +
                          " != header arity " + std::to_string(header_.size()));
    }
    body_ += '\n';
    row_cells_ = 0;
    ++n_rows_;
}

std::string CsvTable::str() const {
    if (row_cells_ != 0) throw DomainError("csv: unterminated row");
    std::string out;
    for (std::size_t i = 0; i < header_.size(); ++i) {
        if (i) out += ',';
        out += header_[i];
    }
    out += '\n';
    out += body_;
    return out;
}

void CsvTable::write(const std::filesystem::path& path) const {
    write_text_file(path, str());
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw ConfigError("cannot open for writing: " + path.string());
    os << text;
    os.flush();
    if (!os) throw ConfigError("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open: " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace foldlab
