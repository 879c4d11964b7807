/* C interface to the trackseg video object segmentation pipeline. */

#ifndef TRACKSEG_H
#define TRACKSEG_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible function.
 */
typedef enum TracksegStatus {
  TRACKSEG_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  TRACKSEG_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  TRACKSEG_STATUS_INVALID_UTF8 = 2,
  /**
   * Configuration or input data rejected by the pipeline.
   */
  TRACKSEG_STATUS_INVALID_ARGUMENT = 3,
  /**
   * The operating system reported an I/O failure.
   */
  TRACKSEG_STATUS_IO = 4,
  /**
   * A file existed but could not be parsed.
   */
  TRACKSEG_STATUS_FORMAT = 5,
  /**
   * The caller's buffer is too small for the requested data.
   */
  TRACKSEG_STATUS_BUFFER_TOO_SMALL = 6,
  /**
   * A frame or selection index is out of range.
   */
  TRACKSEG_STATUS_OUT_OF_RANGE = 7,
} TracksegStatus;

/**
 * Pipeline mode; mirrors the CLI `--mode` values.
 */
typedef enum TracksegMode {
  TRACKSEG_MODE_APPEARANCE = 0,
  TRACKSEG_MODE_CLIP = 1,
  TRACKSEG_MODE_CLIP_TEMPORAL = 2,
  TRACKSEG_MODE_CONN_COMP = 3,
  TRACKSEG_MODE_FULL = 4,
} TracksegMode;

/**
 * Opaque: the per-frame masks and box decisions of one pipeline run.
 */
typedef struct TracksegResult TracksegResult;

/**
 * Opaque: a loaded or generated video (annotation, maps, detections).
 */
typedef struct TracksegVideo TracksegVideo;

/**
 * Flat configuration mirroring the CLI flags. `max_coast < 0` coasts
 * forever; `connectivity` must be 4 or 8.
 */
typedef struct TracksegConfig {
  float t_bin;
  float iou_first;
  float iou_temporal;
  float t_high;
  float t_low;
  uint32_t connectivity;
  bool clip_low_to_box;
  int32_t max_coast;
} TracksegConfig;

/**
 * One box decision for one object in one frame. `kind` is 0 = detected,
 * 1 = appearance-tracked, 2 = coasted.
 */
typedef struct TracksegSelection {
  uint8_t object_id;
  uint32_t kind;
  uint32_t x_min;
  uint32_t y_min;
  uint32_t x_max;
  uint32_t y_max;
  bool lost;
} TracksegSelection;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Last failure message for this thread; empty until something fails.
 * The pointer is invalidated by the next failing call on the same thread.
 */
const char *trackseg_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *trackseg_version(void);

/**
 * Fills `out` with the default configuration (the CLI defaults).
 *
 * # Safety
 * `out` must point to writable memory for one `TracksegConfig`.
 */
enum TracksegStatus trackseg_config_default(struct TracksegConfig *out);

/**
 * Loads a video layout directory into a new handle.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a writable pointer slot.
 */
enum TracksegStatus trackseg_video_load(const char *path, struct TracksegVideo **out);

/**
 * Generates a lane-layout synthetic video (see the CLI `synth` command).
 * When `save_dir` is non-null the layout plus its `gt/` directory is also
 * written there.
 *
 * # Safety
 * `save_dir` must be null or NUL-terminated; `out` must be writable.
 */
enum TracksegStatus trackseg_video_synth(uint64_t seed,
                                         uint32_t frame_count,
                                         uint32_t width,
                                         uint32_t height,
                                         uint32_t distractors,
                                         float noise_sigma,
                                         const char *save_dir,
                                         struct TracksegVideo **out);

/**
 * Releases a video handle; null is ignored.
 *
 * # Safety
 * `video` must have come from this library and not been freed before.
 */
void trackseg_video_free(struct TracksegVideo *video);

/**
 * # Safety
 * `video` must be a live handle from this library.
 */
uint32_t trackseg_video_width(const struct TracksegVideo *video);

/**
 * # Safety
 * `video` must be a live handle from this library.
 */
uint32_t trackseg_video_height(const struct TracksegVideo *video);

/**
 * # Safety
 * `video` must be a live handle from this library.
 */
uint32_t trackseg_video_frame_count(const struct TracksegVideo *video);

/**
 * # Safety
 * `video` must be a live handle from this library.
 */
uint32_t trackseg_video_object_count(const struct TracksegVideo *video);

/**
 * Runs one pipeline mode over the video. `config` may be null for the
 * defaults.
 *
 * # Safety
 * `video` must be a live handle; `config` null or valid; `out` writable.
 */
enum TracksegStatus trackseg_process(const struct TracksegVideo *video,
                                     enum TracksegMode mode,
                                     const struct TracksegConfig *config,
                                     struct TracksegResult **out);

/**
 * Releases a result handle; null is ignored.
 *
 * # Safety
 * `result` must have come from this library and not been freed before.
 */
void trackseg_result_free(struct TracksegResult *result);

/**
 * # Safety
 * `result` must be a live handle from this library.
 */
uint32_t trackseg_result_frame_count(const struct TracksegResult *result);

/**
 * Copies one frame's indexed mask (row-major object ids, 0 = background)
 * into `buffer`, which must hold `width * height` bytes.
 *
 * # Safety
 * `result` must be a live handle; `buffer` must point to `buffer_len`
 * writable bytes.
 */
enum TracksegStatus trackseg_result_mask(const struct TracksegResult *result,
                                         uint32_t frame,
                                         uint8_t *buffer,
                                         size_t buffer_len);

/**
 * Number of box decisions recorded for a frame (0 for frame 0 and in
 * appearance mode).
 *
 * # Safety
 * `result` must be a live handle from this library.
 */
uint32_t trackseg_result_selection_count(const struct TracksegResult *result, uint32_t frame);

/**
 * Fetches one recorded box decision.
 *
 * # Safety
 * `result` must be a live handle; `out` must be writable.
 */
enum TracksegStatus trackseg_result_selection(const struct TracksegResult *result,
                                              uint32_t frame,
                                              uint32_t index,
                                              struct TracksegSelection *out);

/**
 * Writes the result's masks and manifest to a directory, exactly like the
 * CLI `run` command.
 *
 * # Safety
 * `result` must be a live handle; `dir` must be NUL-terminated.
 */
enum TracksegStatus trackseg_result_save(const struct TracksegResult *result, const char *dir);

/**
 * Scores a prediction mask directory against a ground-truth directory and
 * writes the global J mean to `j_mean_out` (see the CLI `eval` command).
 *
 * # Safety
 * `pred_dir` and `gt_dir` must be NUL-terminated; `j_mean_out` writable.
 */
enum TracksegStatus trackseg_eval_dirs(const char *pred_dir,
                                       const char *gt_dir,
                                       bool exclude_last,
                                       double *j_mean_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TRACKSEG_H */
