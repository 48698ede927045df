use super::World;
use crate::error::Result;
use std::io::Write;

/// Collects one CSV row per tick: agent pose, then every person's pose.
#[derive(Debug, Default, Clone)]
pub struct TrajectoryRecorder {
    header: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl TrajectoryRecorder {
    pub fn record(&mut self, world: &World) {
        if self.header.is_empty() {
            self.header = ["tick", "agent_x", "agent_y", "agent_theta"].iter().map(|s| s.to_string()).collect();
            for p in world.persons() {
                for axis in ["x", "y", "theta"] {
                    self.header.push(format!("person{}_{axis}", p.id));
                }
            }
        }
        let a = world.agent().pose;
        let mut row = vec![world.tick() as f64, a.position.x, a.position.y, a.heading];
        for p in world.persons() {
            row.extend([p.position.x, p.position.y, p.heading]);
        }
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().enumerate().map(|(i, v)| if i == 0 { format!("{}", *v as u64) } else { format!("{v}") }))?;
        }
        w.flush()?;
        Ok(())
    }
}
