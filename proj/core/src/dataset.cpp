// Copyright 2026 importantaug contributors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "importantaug/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "importantaug/wav.hpp"

namespace importantaug {

namespace fs = std::filesystem;

namespace {

constexpr int kSampleRate = 16000;
constexpr int kClipSamples = 16000;

void note_rejection(IngestReport* report, const std::string& path, const std::string& why) {
  if (report) report->rejected.push_back(path + ": " + why);
}

// Returns empty and records the reason when the file is unusable as a 1 s
// 16 kHz mono clip. pad_short controls utterance vs noise semantics.
std::vector<float> load_clip(const fs::path& path, bool pad_short, IngestReport* report) {
  WavData wav;
  try {
    wav = read_wav(path);
  } catch (const DataError& e) {
    note_rejection(report, path.string(), e.what());
    return {};
  }
  if (wav.sample_rate_hz != kSampleRate) {
    note_rejection(report, path.string(),
                   "sample rate " + std::to_string(wav.sample_rate_hz) +
                       " Hz; resample to 16 kHz mono before ingestion");
    return {};
  }
  if (wav.num_channels != 1) {
    note_rejection(report, path.string(),
                   std::to_string(wav.num_channels) + " channels; downmix to mono first");
    return {};
  }
  if (wav.samples.size() > kClipSamples && pad_short) {
    note_rejection(report, path.string(), "longer than 1 s");
    return {};
  }
  if (wav.samples.size() < kClipSamples && !pad_short) {
    note_rejection(report, path.string(), "shorter than 1 s (excluded, never padded)");
    return {};
  }
  std::vector<float> samples = std::move(wav.samples);
  samples.resize(kClipSamples, 0.0f);  // tail zero-padding for short utterances
  return samples;
}

std::set<std::string> read_list_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("cannot open split list '" + path.string() + "'");
  std::set<std::string> entries;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (!line.empty()) entries.insert(line);
  }
  return entries;
}

std::vector<fs::path> sorted_wavs_in(const fs::path& dir, bool recursive) {
  std::vector<fs::path> files;
  auto consider = [&files](const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".wav") files.push_back(p);
  };
  if (recursive) {
    for (const auto& entry : fs::recursive_directory_iterator(dir))
      if (entry.is_regular_file()) consider(entry.path());
  } else {
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.is_regular_file()) consider(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

double bin_width_hz(const StftConfig& cfg) {
  return static_cast<double>(cfg.sample_rate_hz) / cfg.window_length;
}

}  // namespace

SpeechDataset load_speech_corpus(const fs::path& root, const fs::path& dev_list,
                                 const fs::path& test_list, IngestReport* report) {
  if (!fs::is_directory(root))
    throw InvalidInputError("speech corpus root '" + root.string() + "' is not a directory");
  const std::set<std::string> dev_ids = read_list_file(dev_list);
  const std::set<std::string> test_ids = read_list_file(test_list);
  for (const auto& id : dev_ids)
    if (test_ids.count(id))
      throw DataError("corrupt split: '" + id + "' appears in both dev and test lists");

  SpeechDataset data;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (!entry.is_directory()) continue;
    const std::string name = entry.path().filename().string();
    if (name.empty() || name[0] == '_') continue;  // e.g. _background_noise_
    data.words.push_back(name);
  }
  std::sort(data.words.begin(), data.words.end());
  if (data.words.empty())
    throw DataError("speech corpus '" + root.string() + "' has no word directories");

  for (size_t label = 0; label < data.words.size(); ++label) {
    const fs::path word_dir = root / data.words[label];
    for (const fs::path& file : sorted_wavs_in(word_dir, /*recursive=*/false)) {
      const std::string id = data.words[label] + "/" + file.filename().string();
      std::vector<float> samples = load_clip(file, /*pad_short=*/true, report);
      if (samples.empty()) continue;
      Utterance utt{std::move(samples), static_cast<int>(label), id};
      if (dev_ids.count(id)) {
        data.dev.push_back(std::move(utt));
      } else if (test_ids.count(id)) {
        data.test.push_back(std::move(utt));
      } else {
        data.train.push_back(std::move(utt));
      }
      if (report) ++report->num_loaded;
    }
  }
  if (data.train.empty() && data.dev.empty() && data.test.empty())
    throw DataError("speech corpus '" + root.string() + "' contains no usable utterances");
  return data;
}

NoisePools load_noise_corpus(const fs::path& root, double train_fraction, Rng stream,
                             IngestReport* report) {
  if (!fs::is_directory(root))
    throw InvalidInputError("noise corpus root '" + root.string() + "' is not a directory");
  if (!(train_fraction >= 0.0 && train_fraction <= 1.0))
    throw ConfigError("noise train_fraction must lie in [0, 1]");

  std::vector<NoiseClip> clips;
  for (const fs::path& file : sorted_wavs_in(root, /*recursive=*/true)) {
    std::vector<float> samples = load_clip(file, /*pad_short=*/false, report);
    if (samples.empty()) continue;
    clips.push_back(NoiseClip{std::move(samples),
                              fs::relative(file, root).generic_string()});
    if (report) ++report->num_loaded;
  }
  if (clips.empty())
    throw DataError("noise corpus '" + root.string() +
                    "': no file is at least 1 s of 16 kHz mono audio");

  // ids are sorted by the scan; shuffle indices under the stream.
  std::vector<size_t> order(clips.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  stream.shuffle(order);
  const auto n_train =
      static_cast<size_t>(std::llround(train_fraction * static_cast<double>(clips.size())));

  NoisePools pools;
  for (size_t i = 0; i < order.size(); ++i) {
    if (i < n_train)
      pools.train.push_back(std::move(clips[order[i]]));
    else
      pools.test.push_back(std::move(clips[order[i]]));
  }
  return pools;
}

std::vector<NoiseClip> crop_long_noise(const fs::path& file, int count, Rng stream) {
  if (count < 0) throw InvalidInputError("crop_long_noise: negative count");
  WavData wav = read_wav(file);
  if (wav.sample_rate_hz != kSampleRate)
    throw InvalidInputError("crop_long_noise: '" + file.string() + "' is " +
                            std::to_string(wav.sample_rate_hz) +
                            " Hz; resample to 16 kHz before use");
  if (wav.num_channels != 1)
    throw InvalidInputError("crop_long_noise: '" + file.string() +
                            "' is not mono; downmix first");
  if (wav.samples.size() < kClipSamples)
    throw InvalidInputError("crop_long_noise: '" + file.string() + "' is shorter than 1 s");

  const auto max_offset = static_cast<int64_t>(wav.samples.size()) - kClipSamples;
  std::vector<NoiseClip> clips;
  clips.reserve(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) {
    const auto offset = static_cast<size_t>(stream.uniform_int(0, max_offset));
    NoiseClip clip;
    clip.samples.assign(wav.samples.begin() + static_cast<long>(offset),
                        wav.samples.begin() + static_cast<long>(offset + kClipSamples));
    clip.id = file.filename().string() + "@" + std::to_string(offset);
    clips.push_back(std::move(clip));
  }
  return clips;
}

EvalSet make_clean_eval_set(std::span<const Utterance> utterances, const StftConfig& stft_cfg,
                            double amplitude_floor) {
  EvalSet set;
  set.snr = SnrDb::infinite();
  for (const Utterance& u : utterances) {
    set.features.push_back(log_magnitude(stft(u.samples, stft_cfg), amplitude_floor));
    set.labels.push_back(u.label);
  }
  return set;
}

NoisyTestSynth::NoisyTestSynth(std::vector<Utterance> speech, std::vector<NoiseClip> noise_pool,
                               Rng stream)
    : speech_(std::move(speech)), noise_(std::move(noise_pool)) {
  if (noise_.empty()) throw DataError("noisy test synthesis: empty noise pool");
  pair_index_.reserve(speech_.size());
  for (size_t i = 0; i < speech_.size(); ++i)
    pair_index_.push_back(
        static_cast<size_t>(stream.uniform_int(0, static_cast<int64_t>(noise_.size()) - 1)));
}

EvalSet NoisyTestSynth::build(SnrDb snr, const StftConfig& stft_cfg,
                              double amplitude_floor) const {
  std::vector<ComplexSpectrogram> speech_specs, noise_specs;
  speech_specs.reserve(speech_.size());
  noise_specs.reserve(speech_.size());
  for (size_t i = 0; i < speech_.size(); ++i) {
    speech_specs.push_back(stft(speech_[i].samples, stft_cfg));
    noise_specs.push_back(stft(noise_[pair_index_[i]].samples, stft_cfg));
  }
  const double gain = compute_gain(speech_specs, noise_specs, snr);

  EvalSet set;
  set.snr = snr;
  Mask ones{Eigen::ArrayXXd::Ones(stft_cfg.num_bins(),
                                  stft_cfg.num_frames(stft_cfg.sample_rate_hz))};
  for (size_t i = 0; i < speech_specs.size(); ++i) {
    const ComplexSpectrogram noisy = mix(speech_specs[i], noise_specs[i], ones, gain);
    set.features.push_back(log_magnitude(noisy, amplitude_floor));
    set.labels.push_back(speech_[i].label);
  }
  return set;
}

std::vector<EvalSet> synth_noisy_testset(const NoisyTestSynth& synth,
                                         std::span<const SnrDb> snr_grid,
                                         const StftConfig& stft_cfg, double amplitude_floor) {
  if (snr_grid.empty()) throw InvalidInputError("synth_noisy_testset: empty SNR grid");
  std::vector<EvalSet> sets;
  sets.reserve(snr_grid.size());
  for (SnrDb snr : snr_grid) sets.push_back(synth.build(snr, stft_cfg, amplitude_floor));
  return sets;
}

void ToyConfig::validate() const {
  if (n_classes < 2) throw ConfigError("toy: need at least two classes");
  if (n_per_class < 4) throw ConfigError("toy: need at least four utterances per class");
  if (!(train_fraction > 0.0 && dev_fraction > 0.0 &&
        train_fraction + dev_fraction < 1.0))
    throw ConfigError("toy: train/dev fractions must be positive and leave room for test");
  if (n_noise_clips < 1) throw ConfigError("toy: need at least one noise clip");
  if (!(cue_amplitude > 0.0)) throw ConfigError("toy: cue_amplitude must be positive");
  if (cue_half_width_bins < 0) throw ConfigError("toy: cue_half_width_bins must be >= 0");
  if (!cue_freqs_hz.empty() && static_cast<int>(cue_freqs_hz.size()) != n_classes)
    throw ConfigError("toy: cue_freqs_hz must list one frequency per class");
}

ToyDataset gen_toy_dataset(const ToyConfig& cfg, const StftConfig& stft_cfg, Rng stream) {
  cfg.validate();
  stft_cfg.validate();

  const int bins = stft_cfg.num_bins();
  const int frames = stft_cfg.num_frames(stft_cfg.sample_rate_hz);
  const double hz_per_bin = bin_width_hz(stft_cfg);

  std::vector<double> cue_freqs = cfg.cue_freqs_hz;
  if (cue_freqs.empty()) {
    // Evenly spaced over 1-6 kHz, snapped to bin centers.
    for (int c = 0; c < cfg.n_classes; ++c) {
      const double raw =
          1000.0 + (6000.0 - 1000.0) * c / std::max(1, cfg.n_classes - 1);
      cue_freqs.push_back(std::round(raw / hz_per_bin) * hz_per_bin);
    }
  }

  ToyDataset toy;
  for (int c = 0; c < cfg.n_classes; ++c) {
    const int center = static_cast<int>(std::llround(cue_freqs[static_cast<size_t>(c)] / hz_per_bin));
    CueRegion region{std::max(0, center - cfg.cue_half_width_bins),
                     std::min(bins, center + cfg.cue_half_width_bins + 1), 0, frames};
    if (region.f_lo >= region.f_hi)
      throw ConfigError("toy: cue frequency for class " + std::to_string(c) +
                        " falls outside the spectrogram");
    toy.cue_regions.push_back(region);
  }
  for (size_t a = 0; a < toy.cue_regions.size(); ++a)
    for (size_t b = a + 1; b < toy.cue_regions.size(); ++b)
      if (toy.cue_regions[a].f_hi > toy.cue_regions[b].f_lo &&
          toy.cue_regions[b].f_hi > toy.cue_regions[a].f_lo)
        throw ConfigError("toy: cue regions of classes " + std::to_string(a) + " and " +
                          std::to_string(b) + " overlap");
  if (cfg.distractor_freq_hz > 0.0) {
    const int dbin = static_cast<int>(std::llround(cfg.distractor_freq_hz / hz_per_bin));
    for (size_t c = 0; c < toy.cue_regions.size(); ++c)
      if (dbin >= toy.cue_regions[c].f_lo && dbin < toy.cue_regions[c].f_hi)
        throw ConfigError("toy: distractor tone overlaps the cue band of class " +
                          std::to_string(c));
  }

  const int rate = stft_cfg.sample_rate_hz;
  auto tone = [rate](std::vector<float>& x, double freq, double amp, double phase) {
    for (size_t n = 0; n < x.size(); ++n)
      x[n] += static_cast<float>(
          amp * std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(n) / rate + phase));
  };

  SpeechDataset& speech = toy.split.speech;
  for (int c = 0; c < cfg.n_classes; ++c) {
    std::string word = "class_" + std::string(c < 10 ? "0" : "") + std::to_string(c);
    speech.words.push_back(word);
  }

  Rng speech_stream = stream.substream("toy-speech");
  const int n_train = static_cast<int>(std::llround(cfg.train_fraction * cfg.n_per_class));
  const int n_dev = static_cast<int>(std::llround(cfg.dev_fraction * cfg.n_per_class));
  if (n_train < 1 || n_dev < 1 || n_train + n_dev >= cfg.n_per_class)
    throw ConfigError("toy: split fractions leave an empty train, dev or test split");
  for (int c = 0; c < cfg.n_classes; ++c) {
    for (int i = 0; i < cfg.n_per_class; ++i) {
      std::vector<float> x(static_cast<size_t>(rate), 0.0f);
      const double jitter = 0.8 + 0.4 * speech_stream.uniform_real();
      tone(x, cue_freqs[static_cast<size_t>(c)], cfg.cue_amplitude * jitter,
           2.0 * std::numbers::pi * speech_stream.uniform_real());
      if (cfg.distractor_freq_hz > 0.0 && cfg.distractor_amplitude > 0.0)
        tone(x, cfg.distractor_freq_hz, cfg.distractor_amplitude,
             2.0 * std::numbers::pi * speech_stream.uniform_real());
      for (auto& s : x)
        s += static_cast<float>(cfg.background_level * speech_stream.normal());

      char buf[32];
      std::snprintf(buf, sizeof(buf), "utt_%04d.wav", i);
      Utterance utt{std::move(x), c, speech.words[static_cast<size_t>(c)] + "/" + buf};
      if (i < n_train)
        speech.train.push_back(std::move(utt));
      else if (i < n_train + n_dev)
        speech.dev.push_back(std::move(utt));
      else
        speech.test.push_back(std::move(utt));
    }
  }

  // Noise clips: white noise plus a couple of wandering tones so the noise
  // has energy both inside and outside the cue bands.
  Rng noise_stream = stream.substream("toy-noise");
  std::vector<NoiseClip> clips;
  for (int i = 0; i < cfg.n_noise_clips; ++i) {
    std::vector<float> x(static_cast<size_t>(rate), 0.0f);
    for (auto& s : x) s = static_cast<float>(0.1 * noise_stream.normal());
    const int n_tones = static_cast<int>(noise_stream.uniform_int(1, 3));
    for (int j = 0; j < n_tones; ++j) {
      const double freq = 300.0 + noise_stream.uniform_real() * 7000.0;
      const double amp = 0.05 + 0.15 * noise_stream.uniform_real();
      tone(x, freq, amp, 2.0 * std::numbers::pi * noise_stream.uniform_real());
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "noise_%03d.wav", i);
    clips.push_back(NoiseClip{std::move(x), buf});
  }
  const auto n_train_noise = static_cast<size_t>(
      std::llround(0.8 * static_cast<double>(clips.size())));
  for (size_t i = 0; i < clips.size(); ++i) {
    if (i < n_train_noise)
      toy.split.noise.train.push_back(std::move(clips[i]));
    else
      toy.split.noise.test.push_back(std::move(clips[i]));
  }
  return toy;
}

void write_toy_corpus(const ToyDataset& toy, const ToyConfig& cfg, const StftConfig& stft_cfg,
                      const fs::path& root) {
  fs::create_directories(root);
  const int rate = stft_cfg.sample_rate_hz;

  auto write_split = [&](std::span<const Utterance> utts) {
    for (const Utterance& u : utts) {
      const fs::path path = root / u.id;
      fs::create_directories(path.parent_path());
      write_wav_pcm16(path, rate, u.samples);
    }
  };
  write_split(toy.split.speech.train);
  write_split(toy.split.speech.dev);
  write_split(toy.split.speech.test);

  auto write_list = [&](const fs::path& path, std::span<const Utterance> utts) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot write list '" + path.string() + "'");
    for (const Utterance& u : utts) out << u.id << "\n";
  };
  write_list(root / "dev_list.txt", toy.split.speech.dev);
  write_list(root / "test_list.txt", toy.split.speech.test);

  fs::create_directories(root / "noise");
  for (const NoiseClip& clip : toy.split.noise.train)
    write_wav_pcm16(root / "noise" / clip.id, rate, clip.samples);
  for (const NoiseClip& clip : toy.split.noise.test)
    write_wav_pcm16(root / "noise" / clip.id, rate, clip.samples);

  std::ofstream cues(root / "cues.json", std::ios::trunc);
  if (!cues) throw DataError("cannot write cues.json");
  cues << "{\n  \"classes\": [\n";
  for (size_t c = 0; c < toy.cue_regions.size(); ++c) {
    const CueRegion& r = toy.cue_regions[c];
    cues << "    {\"word\": \"" << toy.split.speech.words[c] << "\", \"f_lo\": " << r.f_lo
         << ", \"f_hi\": " << r.f_hi << ", \"t_lo\": " << r.t_lo << ", \"t_hi\": " << r.t_hi
         << "}";
    cues << (c + 1 < toy.cue_regions.size() ? ",\n" : "\n");
  }
  cues << "  ],\n  \"n_per_class\": " << cfg.n_per_class << "\n}\n";
}

void write_manifest(const DatasetSplit& split, const fs::path& corpus_root,
                    const fs::path& out_path) {
  std::ofstream out(out_path, std::ios::trunc);
  if (!out) throw DataError("cannot write manifest '" + out_path.string() + "'");
  out << "id,path,label,split\n";
  auto emit_speech = [&](std::span<const Utterance> utts, const char* tag) {
    for (const Utterance& u : utts)
      out << u.id << "," << (corpus_root / u.id).generic_string() << "," << u.label << ","
          << tag << "\n";
  };
  emit_speech(split.speech.train, "train");
  emit_speech(split.speech.dev, "dev");
  emit_speech(split.speech.test, "test");
  auto emit_noise = [&](std::span<const NoiseClip> clips, const char* tag) {
    for (const NoiseClip& c : clips)
      out << c.id << "," << (corpus_root / "noise" / c.id).generic_string() << ",," << tag
          << "\n";
  };
  emit_noise(split.noise.train, "train-noise");
  emit_noise(split.noise.test, "test-noise");
}

}  // namespace importantaug
