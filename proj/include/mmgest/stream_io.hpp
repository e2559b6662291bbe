#pragma once

#include <string>
#include <vector>

#include "mmgest/eval.hpp"
#include "mmgest/pipeline.hpp"
#include "mmgest/synth.hpp"
#include "mmgest/train.hpp"
#include "mmgest/types.hpp"

namespace mmgest {

// Frame streams as JSON Lines: a header object {"frame_rate":..,"meta":{..}}
// followed by one {"frame":..,"t":..,"points":[[x,y,z,doppler,intensity]..]}
// per line. Round trips are value-identical.
void write_stream(const FrameStream& s, const std::string& path);
std::string stream_to_string(const FrameStream& s);
FrameStream read_stream(const std::string& path);
FrameStream stream_from_string(const std::string& text);

// Single clouds as JSON objects.
void write_cloud(const GestureCloud& c, const std::string& path);
GestureCloud read_cloud(const std::string& path);

// Dataset manifest: label dictionaries plus (cloud path, gesture, user) rows;
// cloud paths are resolved relative to the manifest's directory.
void write_dataset(const Dataset& data, const std::string& dir,
                   const std::string& manifest_name = "manifest.json");
Dataset read_dataset(const std::string& manifest_path);

void write_annotations(const OracleAnnotations& ann, const std::string& path);
OracleAnnotations read_annotations(const std::string& path);

// Inference results as JSON Lines, one record per segment.
std::string infer_records_to_string(const std::vector<InferRecord>& records);
void write_infer_records(const std::vector<InferRecord>& records, const std::string& path);
std::vector<InferRecord> read_infer_records(const std::string& path);

// Ground-truth labels for eval, one {"gesture":..,"user":..} JSON per line.
struct TruthRecord {
  int gesture = -1;
  int user = -1;
};
void write_truth(const std::vector<TruthRecord>& truth, const std::string& path);
std::vector<TruthRecord> read_truth(const std::string& path);

// TrainHistory as CSV: epoch,loss,loss_primary,loss_aux,train_accuracy.
std::string history_to_csv(const TrainHistory& h);
void write_history(const TrainHistory& h, const std::string& path);

std::string eval_report_to_json(const EvalReport& r);

// threshold,fpr,tpr rows, optionally tagged with a user id column.
std::string roc_to_csv(const std::vector<RocPoint>& points, int user = -1);

void write_text(const std::string& text, const std::string& path);
std::string read_text(const std::string& path);

}  // namespace mmgest
