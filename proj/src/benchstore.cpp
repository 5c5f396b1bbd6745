#include "simregress/benchstore.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <tuple>

#include "simregress/error.hpp"
#include "simregress/text.hpp"
#include "simregress/timeseries.hpp"

namespace fs = std::filesystem;

namespace simregress {

namespace {

// The first six labels are padded to 10 columns, the rest to 22.
constexpr std::size_t kShortLabelWidth = 10;
constexpr std::size_t kLongLabelWidth = 22;
constexpr std::size_t kShortLabels = 6;

bool is_out_loop(std::string_view name) {
    constexpr std::string_view prefix = "out_loop";
    if (!starts_with(name, prefix) || name.size() == prefix.size()) {
        return false;
    }
    return std::all_of(name.begin() + prefix.size(), name.end(), [](unsigned char c) { return std::isdigit(c); });
}

std::optional<int> model_from_dir(std::string_view name) {
    if (!starts_with(name, "model")) {
        return std::nullopt;
    }
    const auto id = parse_integer(name.substr(5));
    if (!id || *id <= 0) {
        return std::nullopt;
    }
    return static_cast<int>(*id);
}

std::vector<std::string> kept_files(const fs::path& dir) {
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (entry.is_regular_file() && is_reference_file(name)) {
            names.push_back(name);
        }
    }
    std::sort(names.begin(), names.end());
    return names;
}

}  // namespace

const std::array<MachineMetadata::Field, 16>& MachineMetadata::fields() {
    static const std::array<Field, 16> table{{
        {"Machine", &MachineMetadata::machine},
        {"Location", &MachineMetadata::location},
        {"Processor", &MachineMetadata::processor},
        {"Cores/node", &MachineMetadata::cores_per_node},
        {"Author", &MachineMetadata::author},
        {"Comment", &MachineMetadata::comment},
        {"Jorek fortran compiler", &MachineMetadata::fortran_compiler},
        {"Jorek SVN revision", &MachineMetadata::code_revision},
        {"Jorek specific option", &MachineMetadata::code_option},
        {"Pastix compiler", &MachineMetadata::solver_compiler},
        {"Pastix SVN revision", &MachineMetadata::solver_revision},
        {"Pastix specific option", &MachineMetadata::solver_option},
        {"MPI library", &MachineMetadata::mpi_library},
        {"BLAS library", &MachineMetadata::blas_library},
        {"Network", &MachineMetadata::network},
        {"Other info", &MachineMetadata::other},
    }};
    return table;
}

std::string format_readme(const MachineMetadata& metadata) {
    std::string out;
    const auto& fields = MachineMetadata::fields();
    for (std::size_t i = 0; i < fields.size(); ++i) {
        std::string label(fields[i].label);
        label.resize(std::max(label.size(), i < kShortLabels ? kShortLabelWidth : kLongLabelWidth), ' ');
        out += label + " : " + metadata.*(fields[i].member) + "\n";
    }
    return out;
}

MachineMetadata parse_readme(const std::string& text, std::vector<std::string>* warnings) {
    MachineMetadata metadata;
    std::istringstream in(text);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = trim(raw);
        if (line.empty()) {
            continue;
        }
        const auto colon = line.find(':');
        if (colon == std::string_view::npos) {
            if (warnings != nullptr) {
                warnings->push_back("line " + std::to_string(line_no) + ": no ':' separator");
            }
            continue;
        }
        const auto key = trim(line.substr(0, colon));
        const auto value = trim(line.substr(colon + 1));
        const auto& fields = MachineMetadata::fields();
        const auto it =
            std::find_if(fields.begin(), fields.end(), [&](const MachineMetadata::Field& f) { return f.label == key; });
        if (it == fields.end()) {
            if (warnings != nullptr) {
                warnings->push_back("line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
            }
            continue;
        }
        metadata.*(it->member) = value.empty() ? "-" : std::string(value);
    }
    return metadata;
}

MachineMetadata load_machine_metadata(const fs::path& dir, std::vector<std::string>* warnings) {
    const auto path = dir / kReadmeName;
    if (!fs::is_regular_file(path)) {
        throw Error(ErrorCode::MissingReadme, path.string());
    }
    return parse_readme(read_text_file(path.string()), warnings);
}

fs::path default_store_root() {
    if (const char* env = std::getenv("SIMREGRESS_STORE"); env != nullptr && *env != '\0') {
        return env;
    }
    return "benchmark";
}

bool is_reference_file(std::string_view name) {
    return name == kMacroscopicFileName || name == kReadmeName || is_out_loop(name);
}

std::pair<int, std::string> parse_reference_destination(const std::string& destination) {
    const auto slash = destination.find('/');
    if (slash == std::string::npos) {
        throw Error(ErrorCode::InvalidLabel, "expected model<id>/<label>, got '" + destination + "'");
    }
    const auto model = model_from_dir(std::string_view(destination).substr(0, slash));
    const std::string label = destination.substr(slash + 1);
    if (!model) {
        throw Error(ErrorCode::InvalidLabel, "expected model<id>/<label>, got '" + destination + "'");
    }
    if (label.empty() || label.find('/') != std::string::npos || label == "." || label == "..") {
        throw Error(ErrorCode::InvalidLabel, "label must be a nonempty name without '/': '" + label + "'");
    }
    return {*model, label};
}

ReferenceEntry store_reference(const fs::path& run_dir, const fs::path& store_root, int model_id,
                               const std::string& label) {
    parse_reference_destination("model" + std::to_string(model_id) + "/" + label);
    if (!fs::is_regular_file(run_dir / kMacroscopicFileName)) {
        throw Error(ErrorCode::MissingMacroscopicFile, (run_dir / kMacroscopicFileName).string());
    }

    ReferenceEntry entry;
    entry.model_id = model_id;
    entry.label = label;
    entry.path = store_root / ("model" + std::to_string(model_id)) / label;

    fs::create_directories(entry.path.parent_path());
    // create_directory fails on an existing path, which doubles as the
    // per-destination lock.
    if (!fs::create_directory(entry.path)) {
        throw Error(ErrorCode::DestinationExists, entry.path.string());
    }
    for (const auto& name : kept_files(run_dir)) {
        if (name == kReadmeName) {
            continue;
        }
        fs::copy_file(run_dir / name, entry.path / name);
    }
    {
        std::ofstream readme(entry.path / kReadmeName, std::ios::binary);
        readme << format_readme(MachineMetadata{});
        if (!readme) {
            throw Error(ErrorCode::IoFailure, "cannot write README.txt in " + entry.path.string());
        }
    }
    entry.files = kept_files(entry.path);
    return entry;
}

std::vector<ReferenceEntry> list_references(const fs::path& store_root, std::optional<int> model_id) {
    if (!fs::is_directory(store_root)) {
        throw Error(ErrorCode::MissingStoreRoot, store_root.string());
    }
    std::vector<ReferenceEntry> entries;
    for (const auto& model_dir : fs::directory_iterator(store_root)) {
        const auto id = model_from_dir(model_dir.path().filename().string());
        if (!model_dir.is_directory() || !id || (model_id && *id != *model_id)) {
            continue;
        }
        for (const auto& ref : fs::directory_iterator(model_dir.path())) {
            if (!ref.is_directory()) {
                continue;
            }
            ReferenceEntry entry;
            entry.model_id = *id;
            entry.label = ref.path().filename().string();
            entry.path = ref.path();
            if (fs::is_regular_file(ref.path() / kReadmeName)) {
                entry.metadata = load_machine_metadata(ref.path());
            }
            entry.files = kept_files(ref.path());
            entries.push_back(std::move(entry));
        }
    }
    std::sort(entries.begin(), entries.end(), [](const ReferenceEntry& a, const ReferenceEntry& b) {
        return std::tie(a.model_id, a.label) < std::tie(b.model_id, b.label);
    });
    return entries;
}

}  // namespace simregress
