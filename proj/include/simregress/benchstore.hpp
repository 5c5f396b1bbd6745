#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace simregress {

/// Description of the machine a reference run was made on, as kept in the
/// reference's README.txt. Unknown values are `-`.
struct MachineMetadata {
    std::string machine = "-";
    std::string location = "-";
    std::string processor = "-";
    std::string cores_per_node = "-";
    std::string author = "-";
    std::string comment = "-";
    std::string fortran_compiler = "-";
    std::string code_revision = "-";
    std::string code_option = "-";
    std::string solver_compiler = "-";
    std::string solver_revision = "-";
    std::string solver_option = "-";
    std::string mpi_library = "-";
    std::string blas_library = "-";
    std::string network = "-";
    std::string other = "-";

    struct Field {
        std::string_view label;  // as written in README.txt
        std::string MachineMetadata::*member;
    };
    /// The 16 README fields in file order.
    static const std::array<Field, 16>& fields();

    bool operator==(const MachineMetadata&) const = default;
};

inline constexpr const char* kReadmeName = "README.txt";

/// One `Label : value` line per field, labels padded as in existing references.
std::string format_readme(const MachineMetadata& metadata);

/// Splits each line at its first `:`; keys and values are trimmed, internal
/// spacing of values is kept. Unknown keys are skipped and reported in
/// `warnings` when given.
MachineMetadata parse_readme(const std::string& text, std::vector<std::string>* warnings = nullptr);

MachineMetadata load_machine_metadata(const std::filesystem::path& dir, std::vector<std::string>* warnings = nullptr);

struct ReferenceEntry {
    int model_id = 0;
    std::string label;
    std::filesystem::path path;
    MachineMetadata metadata;
    /// Kept file names, sorted.
    std::vector<std::string> files;
};

/// $SIMREGRESS_STORE, else ./benchmark.
std::filesystem::path default_store_root();

/// True for macroscopic_vars.dat, out_loop<k> and README.txt.
bool is_reference_file(std::string_view name);

/// Parses `model<id>/<label>`. Labels must be nonempty and contain no slash.
std::pair<int, std::string> parse_reference_destination(const std::string& destination);

/// Copies the reduced file set of `run_dir` (macroscopic_vars.dat and every
/// out_loop<k>) to <store_root>/model<id>/<label>/ and adds a README.txt
/// template. Existing references are never overwritten.
ReferenceEntry store_reference(const std::filesystem::path& run_dir, const std::filesystem::path& store_root,
                               int model_id, const std::string& label);

/// All references, ordered by model then label; optionally one model only.
std::vector<ReferenceEntry> list_references(const std::filesystem::path& store_root,
                                            std::optional<int> model_id = std::nullopt);

}  // namespace simregress
