#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qpcover/covering.hpp"
#include "qpcover/quiver.hpp"
#include "qpcover/seed.hpp"

namespace qpcover {

struct CoverEntry {
    std::shared_ptr<QuiverCovering> covering;
    std::optional<SheetLabeling> labeling;
    std::string total_name, base_name;
};

struct SeedEntry {
    Seed seed;
    std::string quiver_name; // empty for standalone seeds
};

/// Named quivers, potentials, covers, sheet labelings and seeds parsed
/// from one declarative file (or assembled by the fixture registry).
struct DocumentModel {
    std::map<std::string, QuiverPtr> quivers;
    std::map<std::string, std::shared_ptr<Potential>> potentials;
    std::map<std::string, std::string> potential_quiver;
    std::map<std::string, CoverEntry> covers;
    std::map<std::string, SeedEntry> seeds;
    std::vector<std::pair<std::string, std::string>> declaration_order; // (kind, name)

    const Quiver& quiver(const std::string& name) const;
    QuiverPtr quiver_ptr(const std::string& name) const;
    const Potential& potential(const std::string& name) const;
    const CoverEntry& cover(const std::string& name) const;
    const SeedEntry& seed(const std::string& name) const;
    /// The zero potential when name is empty, else a named lookup checked
    /// against the quiver.
    Potential potential_for(const std::string& quiver_name, const std::string& name) const;

    void add_quiver(const std::string& name, QuiverPtr q);
    void add_potential(const std::string& name, const std::string& quiver_name, Potential w);
    void add_cover(const std::string& name, CoverEntry entry);
    void add_seed(const std::string& name, SeedEntry entry);
};

/// Parses the line-based format; errors carry 1-based line numbers.
DocumentModel parse_document(const std::string& text);

std::string serialize_document(const DocumentModel& doc);

/// Adds src's entries to dst; duplicate names are rejected.
void merge_documents(DocumentModel& dst, const DocumentModel& src);

/// Built-in instances: quivers, potentials, coverings, labelings and rank-2
/// seeds used by the command-line interface and the test suites.
const DocumentModel& fixture_registry();

} // namespace qpcover
