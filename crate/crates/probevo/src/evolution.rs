//! Steady-state evolution of binary images under a fixed network.
//!
//! The population holds images the configured network can fully
//! recognize, each carrying the trained weights that prove it. Fitness
//! is two-dimensional linguistic complexity. Every generation two
//! parents recombine and mutate into two children; a child enters the
//! population only if it is more complex than the current worst member,
//! is not already present, and trains to full recognition starting from
//! its most similar parent's weights. The worst member is replaced. A
//! run stops after a fixed number of generations without any admission.

use std::f64::consts::PI;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::complexity::{complexity_2d_with, Complexity, WindowShapes};
use crate::error::{Error, Result};
use crate::image::BinaryImage;
use crate::network::{pixel_coord, train_to_recognition, LayerSizes, Network, TrainingParams};
use crate::util::fmt_f64;

/// A population member: an image, its complexity, and weights that
/// fully recognize it.
#[derive(Debug, Clone)]
pub struct Genotype {
    image: BinaryImage,
    complexity: Complexity,
    network: Network,
}

impl Genotype {
    /// Builds a genotype after checking that `network` fully recognizes
    /// `image`; the complexity score is computed here.
    pub fn verified(image: BinaryImage, network: Network, shapes: WindowShapes) -> Result<Self> {
        if network.evaluate(&image).fraction_recognized != 1.0 {
            return Err(Error::InvalidArgument(
                "network does not fully recognize the image".into(),
            ));
        }
        let complexity = complexity_2d_with(&image, shapes);
        Ok(Genotype {
            image,
            complexity,
            network,
        })
    }

    pub fn image(&self) -> &BinaryImage {
        &self.image
    }

    pub fn complexity(&self) -> Complexity {
        self.complexity
    }

    pub fn network(&self) -> &Network {
        &self.network
    }
}

/// Parameters of one evolution run.
#[derive(Debug, Clone)]
pub struct EvolutionConfig {
    pub layer_sizes: LayerSizes,
    pub height: usize,
    pub width: usize,
    /// Population size; seeding fills it completely.
    pub capacity: usize,
    /// Per-pixel flip probability applied to every child.
    pub mutation_rate: f64,
    /// Consecutive admission-free generations before the run stops.
    pub stagnation_limit: usize,
    pub training: TrainingParams,
    pub window_shapes: WindowShapes,
    pub seed: u64,
}

impl EvolutionConfig {
    /// The reference parameter set: 20×20 images, population 100,
    /// mutation 0.0025, stagnation limit 100.
    pub fn new(layer_sizes: LayerSizes) -> Self {
        EvolutionConfig {
            layer_sizes,
            height: 20,
            width: 20,
            capacity: 100,
            mutation_rate: 0.0025,
            stagnation_limit: 100,
            training: TrainingParams::default(),
            window_shapes: WindowShapes::Rectangles,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.height == 0 || self.width == 0 {
            return Err(Error::Config("image dimensions must be positive".into()));
        }
        if self.capacity == 0 {
            return Err(Error::Config("population capacity must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return Err(Error::Config(format!(
                "mutation rate must lie in [0, 1], got {}",
                self.mutation_rate
            )));
        }
        if self.stagnation_limit == 0 {
            return Err(Error::Config("stagnation limit must be positive".into()));
        }
        self.training.validate()
    }
}

/// The population: unique images, all fully recognized, at capacity
/// after seeding.
#[derive(Debug, Clone)]
pub struct Population {
    members: Vec<Genotype>,
    capacity: usize,
}

impl Population {
    pub fn members(&self) -> &[Genotype] {
        &self.members
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains_image(&self, img: &BinaryImage) -> bool {
        self.members.iter().any(|m| m.image == *img)
    }

    /// Index of the lowest-complexity member (first such on ties).
    fn min_index(&self) -> usize {
        let mut at = 0;
        for (i, m) in self.members.iter().enumerate() {
            if m.complexity < self.members[at].complexity {
                at = i;
            }
        }
        at
    }

    pub fn min_complexity(&self) -> Complexity {
        self.members[self.min_index()].complexity
    }

    /// The highest-complexity member (first such on ties).
    pub fn best(&self) -> &Genotype {
        let mut at = 0;
        for (i, m) in self.members.iter().enumerate() {
            if m.complexity > self.members[at].complexity {
                at = i;
            }
        }
        &self.members[at]
    }

    /// Arithmetic mean of the raw complexity values.
    pub fn mean_complexity_value(&self) -> f64 {
        let sum: f64 = self.members.iter().map(|m| m.complexity.value()).sum();
        sum / self.members.len() as f64
    }

    fn replace_min(&mut self, genotype: Genotype) {
        let at = self.min_index();
        self.members[at] = genotype;
    }
}

/// An image split into two homogeneous areas by a random straight line.
///
/// The line is drawn as a random normal direction (angle in [0, π)) and
/// a signed offset spanning the image's projection onto it; pixels on
/// the positive side get color 1. Single-colored draws (the line missed
/// the grid) are redrawn; after 100 misses the image is split in half
/// at the median column instead.
pub fn initial_image(height: usize, width: usize, rng: &mut impl Rng) -> BinaryImage {
    for _ in 0..100 {
        let theta = rng.random::<f64>() * PI;
        let (nx, ny) = (theta.cos(), theta.sin());
        let span = nx.abs() + ny.abs();
        let offset = (rng.random::<f64>() * 2.0 - 1.0) * span;
        let img = BinaryImage::from_fn(height, width, |r, c| {
            let (x, y) = pixel_coord(height, width, r, c);
            (nx * x + ny * y - offset > 0.0) as u8
        });
        let first = img.pixels()[0];
        if img.pixels().iter().any(|&p| p != first) {
            return img;
        }
    }
    half_split(height, width)
}

/// Fallback split: left half 0, right half 1 (top/bottom for one-column
/// images).
fn half_split(height: usize, width: usize) -> BinaryImage {
    if width > 1 {
        BinaryImage::from_fn(height, width, |_, c| (c >= width / 2) as u8)
    } else {
        BinaryImage::from_fn(height, width, |r, _| (r >= height / 2) as u8)
    }
}

/// Fills a population with simple line-split images the network can
/// fully recognize, training a fresh random network for each candidate.
///
/// Gives up with [`Error::SeedingInfeasible`] after `10 × capacity`
/// consecutive candidates fail to be admitted.
pub fn seed_population(config: &EvolutionConfig, rng: &mut impl Rng) -> Result<Population> {
    Ok(seed_population_counted(config, rng)?.0)
}

fn seed_population_counted(
    config: &EvolutionConfig,
    rng: &mut impl Rng,
) -> Result<(Population, u64)> {
    config.validate()?;
    let mut pop = Population {
        members: Vec::with_capacity(config.capacity),
        capacity: config.capacity,
    };
    let mut epochs: u64 = 0;
    let mut consecutive = 0usize;
    let mut training_failures = 0usize;
    let mut duplicates = 0usize;
    while pop.len() < config.capacity {
        if consecutive >= 10 * config.capacity {
            return Err(Error::SeedingInfeasible {
                attempts: consecutive,
                training_failures,
                duplicates,
            });
        }
        let img = initial_image(config.height, config.width, rng);
        if pop.contains_image(&img) {
            duplicates += 1;
            consecutive += 1;
            continue;
        }
        let net = Network::random(config.layer_sizes.clone(), rng);
        let outcome = train_to_recognition(net, &img, &config.training)?;
        epochs += outcome.epochs_run as u64;
        if outcome.fully_recognized() {
            let complexity = complexity_2d_with(&img, config.window_shapes);
            pop.members.push(Genotype {
                image: img,
                complexity,
                network: outcome.network,
            });
            consecutive = 0;
        } else {
            training_failures += 1;
            consecutive += 1;
        }
    }
    Ok((pop, epochs))
}

/// One straight cut through both parents, either between two rows or
/// between two columns (equal probability when both are possible), with
/// the cut position uniform over the interior. The children are the two
/// complementary reassemblies.
pub fn recombine(
    a: &BinaryImage,
    b: &BinaryImage,
    rng: &mut impl Rng,
) -> Result<(BinaryImage, BinaryImage)> {
    if (a.height(), a.width()) != (b.height(), b.width()) {
        return Err(Error::InvalidArgument(
            "recombination requires equal dimensions".into(),
        ));
    }
    let can_row = a.height() > 1;
    let can_col = a.width() > 1;
    let row_cut = match (can_row, can_col) {
        (true, true) => rng.random::<bool>(),
        (true, false) => true,
        (false, true) => false,
        (false, false) => return Ok((a.clone(), b.clone())),
    };
    if row_cut {
        let cut = rng.random_range(1..a.height());
        Ok((recombine_rows(a, b, cut), recombine_rows(b, a, cut)))
    } else {
        let cut = rng.random_range(1..a.width());
        Ok((recombine_cols(a, b, cut), recombine_cols(b, a, cut)))
    }
}

fn recombine_rows(top: &BinaryImage, bottom: &BinaryImage, cut: usize) -> BinaryImage {
    BinaryImage::from_fn(top.height(), top.width(), |r, c| {
        if r < cut {
            top.pixel(r, c)
        } else {
            bottom.pixel(r, c)
        }
    })
}

fn recombine_cols(left: &BinaryImage, right: &BinaryImage, cut: usize) -> BinaryImage {
    BinaryImage::from_fn(left.height(), left.width(), |r, c| {
        if c < cut {
            left.pixel(r, c)
        } else {
            right.pixel(r, c)
        }
    })
}

/// Flips each pixel independently with probability `rate`.
pub fn mutate(img: &BinaryImage, rate: f64, rng: &mut impl Rng) -> BinaryImage {
    BinaryImage::from_fn(img.height(), img.width(), |r, c| {
        let flip = rng.random::<f64>() < rate;
        img.pixel(r, c) ^ (flip as u8)
    })
}

/// The parent at smaller Hamming distance from the child; ties go to
/// the first parent.
pub fn most_similar_parent<'a>(
    child: &BinaryImage,
    p1: &'a Genotype,
    p2: &'a Genotype,
) -> &'a Genotype {
    let d1 = child.hamming_distance(&p1.image);
    let d2 = child.hamming_distance(&p2.image);
    if d2 < d1 {
        p2
    } else {
        p1
    }
}

/// How an offered candidate fared.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AdmissionOutcome {
    /// Not more complex than the population's worst member; no training ran.
    RejectedComplexity { complexity: Complexity },
    /// Image already present; no training ran.
    RejectedDuplicate,
    /// Training from the inherited weights did not reach full recognition.
    RejectedTraining { epochs: u64 },
    /// Admitted; the worst member was replaced.
    Admitted { complexity: Complexity, epochs: u64 },
}

impl AdmissionOutcome {
    pub fn admitted(&self) -> bool {
        matches!(self, AdmissionOutcome::Admitted { .. })
    }

    /// Training epochs this offer cost (0 when a gate rejected it).
    pub fn epochs(&self) -> u64 {
        match self {
            AdmissionOutcome::RejectedTraining { epochs }
            | AdmissionOutcome::Admitted { epochs, .. } => *epochs,
            _ => 0,
        }
    }
}

/// Offers a candidate image to the population.
///
/// Gate order: complexity (must strictly exceed the current minimum),
/// duplicate check, then training from `inherited` weights. Only a
/// fully recognized candidate replaces the minimum-complexity member.
pub fn try_admit(
    pop: &mut Population,
    candidate: BinaryImage,
    inherited: Network,
    config: &EvolutionConfig,
) -> Result<AdmissionOutcome> {
    let complexity = complexity_2d_with(&candidate, config.window_shapes);
    if complexity <= pop.min_complexity() {
        return Ok(AdmissionOutcome::RejectedComplexity { complexity });
    }
    if pop.contains_image(&candidate) {
        return Ok(AdmissionOutcome::RejectedDuplicate);
    }
    let outcome = train_to_recognition(inherited, &candidate, &config.training)?;
    let epochs = outcome.epochs_run as u64;
    if !outcome.fully_recognized() {
        return Ok(AdmissionOutcome::RejectedTraining { epochs });
    }
    pop.replace_min(Genotype {
        image: candidate,
        complexity,
        network: outcome.network,
    });
    Ok(AdmissionOutcome::Admitted { complexity, epochs })
}

/// Population statistics logged once per generation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerationRecord {
    pub generation: usize,
    pub best: Complexity,
    pub min: Complexity,
    pub mean_value: f64,
    /// Successful admissions in this generation (0 for the seed row).
    pub admissions: usize,
    /// Training epochs spent so far, seeding included.
    pub cumulative_epochs: u64,
}

/// Full log of one run: one record per generation (the first row is
/// the freshly seeded population) plus the final champion.
#[derive(Debug, Clone)]
pub struct RunLog {
    pub records: Vec<GenerationRecord>,
    pub champion: Genotype,
}

impl RunLog {
    pub fn final_generation(&self) -> usize {
        self.records.last().map(|r| r.generation).unwrap_or(0)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "generation,best_complexity,best_log_complexity,min_complexity,mean_complexity,admissions,cumulative_epochs\n",
        );
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.generation,
                fmt_f64(r.best.value()),
                fmt_f64(r.best.ln()),
                fmt_f64(r.min.value()),
                fmt_f64(r.mean_value),
                r.admissions,
                r.cumulative_epochs
            ));
        }
        out
    }
}

/// A stepwise evolution run: seeded on construction, advanced one
/// generation at a time. [`evolve`] drives it to completion.
pub struct Evolution {
    config: EvolutionConfig,
    rng: ChaCha8Rng,
    population: Population,
    records: Vec<GenerationRecord>,
    generation: usize,
    stagnant: usize,
    cumulative_epochs: u64,
}

impl Evolution {
    /// Seeds a run from the config's RNG seed.
    pub fn new(config: EvolutionConfig) -> Result<Evolution> {
        config.validate()?;
        if config.capacity < 2 {
            return Err(Error::Config(
                "evolution needs a population of at least 2 for parent selection".into(),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let (population, epochs) = seed_population_counted(&config, &mut rng)?;
        Ok(Self::with_population(config, rng, population, epochs))
    }

    /// Resumes from an existing population (for example a checkpoint).
    /// The epoch counter restarts at zero and the random stream starts
    /// fresh from the config seed.
    pub fn resume(config: EvolutionConfig, population: Population) -> Result<Evolution> {
        config.validate()?;
        if population.len() != config.capacity {
            return Err(Error::Config(format!(
                "checkpoint population has {} members, config expects {}",
                population.len(),
                config.capacity
            )));
        }
        for m in population.members() {
            if (m.image.height(), m.image.width()) != (config.height, config.width) {
                return Err(Error::Config(
                    "checkpoint image dimensions do not match the config".into(),
                ));
            }
            if m.network.layer_sizes() != &config.layer_sizes {
                return Err(Error::Config(
                    "checkpoint network shape does not match the config".into(),
                ));
            }
        }
        let rng = ChaCha8Rng::seed_from_u64(config.seed);
        Ok(Self::with_population(config, rng, population, 0))
    }

    fn with_population(
        config: EvolutionConfig,
        rng: ChaCha8Rng,
        population: Population,
        seed_epochs: u64,
    ) -> Evolution {
        let mut evo = Evolution {
            config,
            rng,
            population,
            records: Vec::new(),
            generation: 0,
            stagnant: 0,
            cumulative_epochs: seed_epochs,
        };
        evo.records.push(evo.record(0));
        evo
    }

    fn record(&self, admissions: usize) -> GenerationRecord {
        GenerationRecord {
            generation: self.generation,
            best: self.population.best().complexity(),
            min: self.population.min_complexity(),
            mean_value: self.population.mean_complexity_value(),
            admissions,
            cumulative_epochs: self.cumulative_epochs,
        }
    }

    pub fn population(&self) -> &Population {
        &self.population
    }

    pub fn records(&self) -> &[GenerationRecord] {
        &self.records
    }

    pub fn finished(&self) -> bool {
        self.stagnant >= self.config.stagnation_limit
    }

    /// Runs one generation: picks two distinct parents, recombines and
    /// mutates two children, and offers each in turn (the second sees
    /// the population as updated by the first).
    pub fn step(&mut self) -> Result<&GenerationRecord> {
        self.generation += 1;
        let n = self.population.len();
        let i = self.rng.random_range(0..n);
        let j = {
            let j = self.rng.random_range(0..n - 1);
            if j >= i {
                j + 1
            } else {
                j
            }
        };
        let (img_i, img_j) = (
            self.population.members()[i].image().clone(),
            self.population.members()[j].image().clone(),
        );
        let (c1, c2) = recombine(&img_i, &img_j, &mut self.rng)?;
        let c1 = mutate(&c1, self.config.mutation_rate, &mut self.rng);
        let c2 = mutate(&c2, self.config.mutation_rate, &mut self.rng);

        let mut admissions = 0;
        for child in [c1, c2] {
            let inherited = {
                let p1 = &self.population.members()[i];
                let p2 = &self.population.members()[j];
                most_similar_parent(&child, p1, p2).network().clone()
            };
            let outcome = try_admit(&mut self.population, child, inherited, &self.config)?;
            self.cumulative_epochs += outcome.epochs();
            if outcome.admitted() {
                admissions += 1;
            }
        }
        if admissions > 0 {
            self.stagnant = 0;
        } else {
            self.stagnant += 1;
        }
        let rec = self.record(admissions);
        self.records.push(rec);
        Ok(self.records.last().unwrap())
    }

    /// Runs to stagnation and returns the log.
    pub fn run(mut self) -> Result<RunLog> {
        while !self.finished() {
            self.step()?;
        }
        let champion = self.population.best().clone();
        Ok(RunLog {
            records: self.records,
            champion,
        })
    }
}

/// Seeds and runs one full evolution, returning its log and champion.
/// Fully reproducible: the config seed determines every draw.
pub fn evolve(config: EvolutionConfig) -> Result<RunLog> {
    Evolution::new(config)?.run()
}

// --- checkpoints -------------------------------------------------------
//
// A checkpoint is a directory: `meta.txt` plus one PBM image and one
// weight CSV per member. Loading re-verifies full recognition and
// recomputes complexities, so a checkpoint can only produce a valid
// population.

impl Population {
    pub fn save_checkpoint(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let meta = format!(
            "probevo checkpoint v1\nmembers = {}\ncapacity = {}\n",
            self.len(),
            self.capacity
        );
        std::fs::write(dir.join("meta.txt"), meta)
            .map_err(|e| Error::io(dir.join("meta.txt"), e))?;
        for (k, m) in self.members.iter().enumerate() {
            m.image
                .write_pbm_file(&dir.join(format!("member_{k:04}.pbm")))?;
            m.network
                .write_weight_csv_file(&dir.join(format!("member_{k:04}.weights.csv")))?;
        }
        Ok(())
    }

    pub fn load_checkpoint(dir: &Path, shapes: WindowShapes) -> Result<Population> {
        let meta_path = dir.join("meta.txt");
        let meta = std::fs::read_to_string(&meta_path).map_err(|e| Error::io(&meta_path, e))?;
        let mut members_count = None;
        let mut capacity = None;
        for line in meta.lines().skip(1) {
            if let Some((key, value)) = line.split_once('=') {
                match key.trim() {
                    "members" => members_count = value.trim().parse::<usize>().ok(),
                    "capacity" => capacity = value.trim().parse::<usize>().ok(),
                    _ => {}
                }
            }
        }
        let members_count =
            members_count.ok_or_else(|| Error::Parse("checkpoint meta missing members".into()))?;
        let capacity =
            capacity.ok_or_else(|| Error::Parse("checkpoint meta missing capacity".into()))?;
        let mut members = Vec::with_capacity(members_count);
        for k in 0..members_count {
            let image = BinaryImage::read_pbm_file(&dir.join(format!("member_{k:04}.pbm")))?;
            let network =
                Network::read_weight_csv_file(&dir.join(format!("member_{k:04}.weights.csv")))?;
            members.push(Genotype::verified(image, network, shapes)?);
        }
        for (a, ga) in members.iter().enumerate() {
            for gb in members.iter().skip(a + 1) {
                if ga.image == gb.image {
                    return Err(Error::Parse("checkpoint contains duplicate images".into()));
                }
            }
        }
        Ok(Population { members, capacity })
    }
}
