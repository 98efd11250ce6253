#ifndef MATEFORGE_H
#define MATEFORGE_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every call.
 */
typedef enum MfStatus {
  MF_STATUS_OK = 0,
  MF_STATUS_NULL_ARGUMENT = 1,
  MF_STATUS_INVALID_UTF8 = 2,
  MF_STATUS_DOCUMENT = 3,
  MF_STATUS_INVALID_CONFIG = 4,
  MF_STATUS_UNKNOWN_PART = 5,
  MF_STATUS_ANALYSIS = 6,
  MF_STATUS_IO = 7,
  MF_STATUS_PANIC = 8,
} MfStatus;

/**
 * Kind of a relative motion group.
 */
typedef enum MfGroupKind {
  MF_GROUP_KIND_FIXED = 0,
  MF_GROUP_KIND_ROTATION = 1,
  MF_GROUP_KIND_TRANSLATION = 2,
  MF_GROUP_KIND_CYLINDRICAL = 3,
  MF_GROUP_KIND_COMPLEX = 4,
} MfGroupKind;

/**
 * Opaque assembly handle.
 */
typedef struct MfAssembly MfAssembly;

/**
 * Relative motion between two parts. `point` is meaningful for rotation and
 * cylindrical groups, `direction` for every kind except fixed and complex.
 */
typedef struct MfMotion {
  enum MfGroupKind kind;
  double point[3];
  double direction[3];
} MfMotion;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null after a success.
 * Valid until the next call on the same thread.
 */
const char *mf_last_error_message(void);

/**
 * Releases a string returned by this library. Null is ignored.
 */
void mf_string_free(char *s);

/**
 * Parses and validates an assembly document.
 */
enum MfStatus mf_assembly_load_json(const char *json, struct MfAssembly **out_assembly);

/**
 * Reads and validates an assembly document from a file.
 */
enum MfStatus mf_assembly_load_file(const char *path, struct MfAssembly **out_assembly);

/**
 * Releases an assembly handle. Null is ignored.
 */
void mf_assembly_free(struct MfAssembly *assembly);

/**
 * Serializes an assembly to its canonical document text.
 */
enum MfStatus mf_assembly_to_json(const struct MfAssembly *assembly, char **out_json);

enum MfStatus mf_assembly_part_count(const struct MfAssembly *assembly, size_t *out_count);

enum MfStatus mf_assembly_mate_count(const struct MfAssembly *assembly, size_t *out_count);

/**
 * Runs every filter stage and densification on one assembly.
 *
 * `out_kept` receives 1 when the assembly survives. `out_outcome_json`
 * receives the filter outcome. `out_densified` is optional; when given it
 * receives the densified assembly for kept assemblies and null otherwise.
 */
enum MfStatus mf_filter(const struct MfAssembly *assembly,
                        const char *config_json,
                        int *out_kept,
                        char **out_outcome_json,
                        struct MfAssembly **out_densified);

/**
 * Adds the mates implied by contact and shared axes. `out_added` is optional.
 */
enum MfStatus mf_densify(const struct MfAssembly *assembly,
                         const char *config_json,
                         struct MfAssembly **out_assembly,
                         size_t *out_added);

/**
 * Motion of `part_b` relative to `part_a` implied by the mate graph.
 */
enum MfStatus mf_relative_motion(const struct MfAssembly *assembly,
                                 const char *part_a,
                                 const char *part_b,
                                 const char *config_json,
                                 struct MfMotion *out_motion);

/**
 * Minimum distance between two placed parts and whether they are in contact
 * under the configured tolerance. `out_in_contact` is optional.
 */
enum MfStatus mf_min_distance(const struct MfAssembly *assembly,
                              const char *part_a,
                              const char *part_b,
                              const char *config_json,
                              double *out_distance,
                              int *out_in_contact);

/**
 * Predicts a type and axis for every mated pair. `out_predicted` receives an
 * assembly whose mates are the predictions; `out_predictions_json` is optional
 * and receives the per-mate scores.
 */
enum MfStatus mf_predict(const struct MfAssembly *assembly,
                         const char *config_json,
                         struct MfAssembly **out_predicted,
                         char **out_predictions_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MATEFORGE_H */
