#pragma once

#include <iosfwd>
#include <string>
#include <variant>

#include "psvm/corpus.hpp"
#include "psvm/svm.hpp"

namespace psvm {

enum class TaskMode { Binary, Multiclass };

// Everything needed to predict on raw phrases: the trained model plus the
// vocabulary and feature mode it was built with. Serialized as a versioned
// text file; doubles are written with 17 significant digits so a
// save/load round trip reproduces predictions exactly.
struct SavedModel {
    TaskMode mode = TaskMode::Binary;
    FeatureMode features = FeatureMode::Binary;
    Vocabulary vocab;
    std::variant<BinarySvm, MulticlassSvm> model;

    const BinarySvm& binary() const { return std::get<BinarySvm>(model); }
    const MulticlassSvm& multiclass() const { return std::get<MulticlassSvm>(model); }
};

void save_model(std::ostream& out, const SavedModel& saved);
void save_model_file(const std::string& path, const SavedModel& saved);

// Throws ParseError on unreadable files, version mismatches, or a
// malformed body.
SavedModel load_model(std::istream& in);
SavedModel load_model_file(const std::string& path);

}  // namespace psvm
