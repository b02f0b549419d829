#pragma once

// Deterministic text artifacts: CSV tables with 17-significant-digit floats
// and fixed row/column order, so identical configs reproduce identical bytes.

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace foldlab {

/// printf "%.17g" rendering; 17 significant digits identify a binary64
/// value exactly, so reruns of the same computation emit the same text.
std::string g17(double v);

/// Row-by-row CSV builder.  Cells may not contain separators; end_row
/// checks the arity against the header.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    CsvTable& cell(double v);
    CsvTable& cell(int v);
    CsvTable& cell(long v);
    CsvTable& cell(std::size_t v);
    CsvTable& cell(bool v);  // rendered 0/1
    CsvTable& cell(const std::string& s);
    CsvTable& cell(const char* s);
    void end_row();

    std::size_t rows() const { return n_rows_; }
    std::string str() const;
    void write(const std::filesystem::path& path) const;

private:
    CsvTable& raw(std::string text);

    std::vector<std::string> header_;
    std::string body_;
    std::size_t n_rows_ = 0;
    std::size_t row_cells_ = 0;
};

/// Write text to path, creating parent directories first.
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Read a whole file (ConfigError if unreadable).
std::string read_text_file(const std::filesystem::path& path);

}  // namespace foldlab
